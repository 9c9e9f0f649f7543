#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace evid {

class SubsetMask;

/// A frame of discernment: an ordered finite set of mutually exclusive,
/// exhaustive outcomes. Immutable after construction; copies share storage.
/// Subsets of a frame are represented as bit masks (see SubsetMask), so a
/// frame holds at most 64 outcomes.
class Frame {
public:
    explicit Frame(std::vector<std::string> labels);

    std::size_t size() const;
    const std::vector<std::string>& labels() const;
    const std::string& label(std::size_t i) const;

    /// Index of a label; throws std::invalid_argument for unknown labels.
    std::size_t index_of(const std::string& label) const;
    bool has_label(const std::string& label) const;

    SubsetMask empty_set() const;
    SubsetMask full_set() const;
    SubsetMask singleton(std::size_t outcome) const;
    /// Subset from outcome labels (any order, duplicates allowed).
    SubsetMask subset(std::span<const std::string> members) const;
    SubsetMask subset(std::initializer_list<const char*> members) const;

    /// Frames compare structurally: same labels in the same order.
    bool operator==(const Frame& other) const;
    bool operator!=(const Frame& other) const { return !(*this == other); }

    static constexpr std::size_t max_size = 64;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// A subset of a Frame's outcomes as a bit mask. Each mask remembers its
/// owning frame; operations on masks of different frames throw, since
/// silently mixing frames is the main failure mode when several frames of
/// different granularity are in play.
class SubsetMask {
public:
    SubsetMask(Frame frame, std::uint64_t bits);

    const Frame& frame() const { return frame_; }
    std::uint64_t bits() const { return bits_; }

    std::size_t count() const;
    bool empty() const { return bits_ == 0; }
    bool is_full() const;
    bool contains(std::size_t outcome) const;

    bool is_subset_of(const SubsetMask& other) const;
    bool intersects(const SubsetMask& other) const;
    SubsetMask complement() const;

    /// Member labels in frame order.
    std::vector<std::string> member_labels() const;
    /// Indices of member outcomes in ascending order.
    std::vector<std::size_t> members() const;

    friend SubsetMask operator|(const SubsetMask& a, const SubsetMask& b);
    friend SubsetMask operator&(const SubsetMask& a, const SubsetMask& b);
    bool operator==(const SubsetMask& other) const;
    bool operator!=(const SubsetMask& other) const { return !(*this == other); }

private:
    Frame frame_;
    std::uint64_t bits_;
};

/// A refining maps each outcome of a coarse frame to a non-empty subset of a
/// fine frame; the images are pairwise disjoint and together cover the fine
/// frame. Construction validates all three conditions.
class Refining {
public:
    Refining(Frame coarse, Frame fine, std::vector<SubsetMask> images);

    const Frame& coarse() const { return coarse_; }
    const Frame& fine() const { return fine_; }
    const SubsetMask& image(std::size_t coarse_outcome) const;

    /// Extension of the refining to arbitrary coarse subsets: the union of
    /// the images of the member outcomes. Maps the empty set to the empty
    /// set and the full coarse frame to the full fine frame.
    SubsetMask refine(const SubsetMask& coarse_subset) const;

private:
    Frame coarse_;
    Frame fine_;
    std::vector<SubsetMask> images_;
};

inline SubsetMask refine_subset(const Refining& r, const SubsetMask& a) {
    return r.refine(a);
}

}  // namespace evid
