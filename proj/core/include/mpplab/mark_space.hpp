#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mpplab {

/// Reserved label for "this component did not jump" in merged marks.
inline constexpr std::string_view kZeroSymbol = "0";

/// Position of a mark inside its MarkSpace.
struct MarkId {
    std::size_t index = 0;
    friend constexpr auto operator<=>(MarkId, MarkId) = default;
};

/// A mark label is a tuple of coordinates. Component spaces use 1-tuples;
/// merged spaces use d-tuples over E^i plus the zero symbol.
using MarkLabel = std::vector<std::string>;

/// Finite, ordered, duplicate-free set of marks.
///
/// Invariants checked at construction:
///  - at least one label, all labels share the same arity >= 1;
///  - every coordinate is non-empty;
///  - a 1-tuple is never the zero symbol;
///  - a d-tuple (d > 1) is never all zero symbols.
class MarkSpace {
public:
    explicit MarkSpace(std::vector<MarkLabel> labels);

    /// Convenience for component spaces: one coordinate per label.
    static MarkSpace flat(const std::vector<std::string>& names);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t arity() const noexcept { return arity_; }

    const MarkLabel& label(MarkId id) const;
    std::span<const MarkLabel> labels() const noexcept { return labels_; }

    bool contains(MarkId id) const noexcept { return id.index < labels_.size(); }
    std::optional<MarkId> find(const MarkLabel& label) const;

    /// Throws std::domain_error for labels outside the space.
    MarkId id(const MarkLabel& label) const;
    MarkId id(std::string_view flat_label) const;

    /// "a" for 1-tuples, "(a,0,c)" otherwise.
    std::string display(MarkId id) const;

    friend bool operator==(const MarkSpace& a, const MarkSpace& b) { return a.labels_ == b.labels_; }

private:
    std::vector<MarkLabel> labels_;
    std::size_t arity_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

using MarkSpacePtr = std::shared_ptr<const MarkSpace>;

inline MarkSpacePtr make_flat_space(const std::vector<std::string>& names)
{
    return std::make_shared<const MarkSpace>(MarkSpace::flat(names));
}

/// Throws std::domain_error unless every id is inside the space.
void require_marks(const MarkSpace& space, std::span<const MarkId> ids);

} // namespace mpplab
