#include "evid/frame.hpp"

#include <bit>
#include <stdexcept>
#include <unordered_map>

namespace evid {

struct Frame::Impl {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> index;
};

Frame::Frame(std::vector<std::string> labels) {
    if (labels.empty())
        throw std::invalid_argument("Frame: outcome list must not be empty");
    if (labels.size() > max_size)
        throw std::invalid_argument("Frame: at most 64 outcomes are supported");
    auto impl = std::make_shared<Impl>();
    impl->labels = std::move(labels);
    for (std::size_t i = 0; i < impl->labels.size(); ++i) {
        const auto& name = impl->labels[i];
        if (name.empty())
            throw std::invalid_argument("Frame: outcome labels must be non-empty");
        if (!impl->index.emplace(name, i).second)
            throw std::invalid_argument("Frame: duplicate outcome label '" + name + "'");
    }
    impl_ = std::move(impl);
}

std::size_t Frame::size() const { return impl_->labels.size(); }

const std::vector<std::string>& Frame::labels() const { return impl_->labels; }

const std::string& Frame::label(std::size_t i) const {
    if (i >= size())
        throw std::invalid_argument("Frame: outcome index out of range");
    return impl_->labels[i];
}

std::size_t Frame::index_of(const std::string& label) const {
    auto it = impl_->index.find(label);
    if (it == impl_->index.end())
        throw std::invalid_argument("Frame: unknown outcome label '" + label + "'");
    return it->second;
}

bool Frame::has_label(const std::string& label) const {
    return impl_->index.count(label) != 0;
}

bool Frame::operator==(const Frame& other) const {
    return impl_ == other.impl_ || impl_->labels == other.impl_->labels;
}

SubsetMask Frame::empty_set() const { return SubsetMask(*this, 0); }

SubsetMask Frame::full_set() const {
    const std::uint64_t bits =
        size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << size()) - 1;
    return SubsetMask(*this, bits);
}

SubsetMask Frame::singleton(std::size_t outcome) const {
    if (outcome >= size())
        throw std::invalid_argument("Frame: outcome index out of range");
    return SubsetMask(*this, std::uint64_t{1} << outcome);
}

SubsetMask Frame::subset(std::span<const std::string> members) const {
    std::uint64_t bits = 0;
    for (const auto& name : members) bits |= std::uint64_t{1} << index_of(name);
    return SubsetMask(*this, bits);
}

SubsetMask Frame::subset(std::initializer_list<const char*> members) const {
    std::uint64_t bits = 0;
    for (const char* name : members) bits |= std::uint64_t{1} << index_of(name);
    return SubsetMask(*this, bits);
}

namespace {

void require_same_frame(const SubsetMask& a, const SubsetMask& b) {
    if (a.frame() != b.frame())
        throw std::invalid_argument("SubsetMask: operands belong to different frames");
}

}  // namespace

SubsetMask::SubsetMask(Frame frame, std::uint64_t bits)
    : frame_(std::move(frame)), bits_(bits) {
    const std::uint64_t full =
        frame_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << frame_.size()) - 1;
    if ((bits_ & ~full) != 0)
        throw std::invalid_argument("SubsetMask: bits outside the frame");
}

std::size_t SubsetMask::count() const { return std::popcount(bits_); }

bool SubsetMask::is_full() const { return *this == frame_.full_set(); }

bool SubsetMask::contains(std::size_t outcome) const {
    if (outcome >= frame_.size())
        throw std::invalid_argument("SubsetMask: outcome index out of range");
    return (bits_ >> outcome) & 1;
}

bool SubsetMask::is_subset_of(const SubsetMask& other) const {
    require_same_frame(*this, other);
    return (bits_ & ~other.bits_) == 0;
}

bool SubsetMask::intersects(const SubsetMask& other) const {
    require_same_frame(*this, other);
    return (bits_ & other.bits_) != 0;
}

SubsetMask SubsetMask::complement() const {
    return SubsetMask(frame_, frame_.full_set().bits() & ~bits_);
}

std::vector<std::string> SubsetMask::member_labels() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < frame_.size(); ++i)
        if (contains(i)) out.push_back(frame_.label(i));
    return out;
}

std::vector<std::size_t> SubsetMask::members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < frame_.size(); ++i)
        if (contains(i)) out.push_back(i);
    return out;
}

SubsetMask operator|(const SubsetMask& a, const SubsetMask& b) {
    require_same_frame(a, b);
    return SubsetMask(a.frame_, a.bits_ | b.bits_);
}

SubsetMask operator&(const SubsetMask& a, const SubsetMask& b) {
    require_same_frame(a, b);
    return SubsetMask(a.frame_, a.bits_ & b.bits_);
}

bool SubsetMask::operator==(const SubsetMask& other) const {
    require_same_frame(*this, other);
    return bits_ == other.bits_;
}

Refining::Refining(Frame coarse, Frame fine, std::vector<SubsetMask> images)
    : coarse_(std::move(coarse)), fine_(std::move(fine)), images_(std::move(images)) {
    if (images_.size() != coarse_.size())
        throw std::invalid_argument("Refining: need exactly one image per coarse outcome");
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < images_.size(); ++i) {
        const SubsetMask& img = images_[i];
        if (img.frame() != fine_)
            throw std::invalid_argument("Refining: image of '" + coarse_.label(i) +
                                        "' is not a subset of the fine frame");
        if (img.empty())
            throw std::invalid_argument("Refining: image of '" + coarse_.label(i) +
                                        "' is empty");
        if ((seen & img.bits()) != 0)
            throw std::invalid_argument("Refining: image of '" + coarse_.label(i) +
                                        "' overlaps another image");
        seen |= img.bits();
    }
    if (seen != fine_.full_set().bits())
        throw std::invalid_argument("Refining: images do not cover the fine frame");
}

const SubsetMask& Refining::image(std::size_t coarse_outcome) const {
    if (coarse_outcome >= coarse_.size())
        throw std::invalid_argument("Refining: coarse outcome index out of range");
    return images_[coarse_outcome];
}

SubsetMask Refining::refine(const SubsetMask& coarse_subset) const {
    if (coarse_subset.frame() != coarse_)
        throw std::invalid_argument("Refining: subset does not belong to the coarse frame");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < coarse_.size(); ++i)
        if (coarse_subset.contains(i)) bits |= images_[i].bits();
    return SubsetMask(fine_, bits);
}

}  // namespace evid
