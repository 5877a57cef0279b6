#include "mpplab/mark_space.hpp"

#include <stdexcept>

namespace mpplab {

namespace {

std::string join_key(const MarkLabel& label)
{
    std::string key;
    for (const auto& c : label) {
        key += c;
        key += '\x1f';
    }
    return key;
}

} // namespace

MarkSpace::MarkSpace(std::vector<MarkLabel> labels) : labels_(std::move(labels))
{
    if (labels_.empty()) {
        throw std::invalid_argument("mark space must contain at least one mark");
    }
    arity_ = labels_.front().size();
    if (arity_ == 0) {
        throw std::invalid_argument("mark labels must have at least one coordinate");
    }
    index_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        const auto& label = labels_[i];
        if (label.size() != arity_) {
            throw std::invalid_argument("mark labels must share one arity");
        }
        bool all_zero = true;
        for (const auto& c : label) {
            if (c.empty()) {
                throw std::invalid_argument("mark coordinates must be non-empty");
            }
            all_zero = all_zero && c == kZeroSymbol;
        }
        if (all_zero) {
            throw std::invalid_argument(arity_ == 1 ? "the zero symbol is reserved and cannot be a component mark"
                                                    : "merged mark spaces never contain the all-zero tuple");
        }
        if (!index_.emplace(join_key(label), i).second) {
            throw std::invalid_argument("duplicate mark label: " + display(MarkId{i}));
        }
    }
}

MarkSpace MarkSpace::flat(const std::vector<std::string>& names)
{
    std::vector<MarkLabel> labels;
    labels.reserve(names.size());
    for (const auto& n : names) {
        labels.push_back(MarkLabel{n});
    }
    return MarkSpace(std::move(labels));
}

const MarkLabel& MarkSpace::label(MarkId id) const
{
    if (!contains(id)) {
        throw std::domain_error("mark index " + std::to_string(id.index) + " outside mark space");
    }
    return labels_[id.index];
}

std::optional<MarkId> MarkSpace::find(const MarkLabel& label) const
{
    auto it = index_.find(join_key(label));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return MarkId{it->second};
}

MarkId MarkSpace::id(const MarkLabel& label) const
{
    if (auto found = find(label)) {
        return *found;
    }
    std::string shown;
    for (const auto& c : label) {
        shown += shown.empty() ? c : "," + c;
    }
    throw std::domain_error("unknown mark: " + shown);
}

MarkId MarkSpace::id(std::string_view flat_label) const
{
    return id(MarkLabel{std::string(flat_label)});
}

std::string MarkSpace::display(MarkId id) const
{
    const auto& l = labels_.at(id.index);
    if (l.size() == 1) {
        return l.front();
    }
    std::string out = "(";
    for (std::size_t i = 0; i < l.size(); ++i) {
        out += (i == 0 ? "" : ",") + l[i];
    }
    return out + ")";
}

void require_marks(const MarkSpace& space, std::span<const MarkId> ids)
{
    for (auto id : ids) {
        if (!space.contains(id)) {
            throw std::domain_error("mark index " + std::to_string(id.index) + " outside mark space");
        }
    }
}

} // namespace mpplab
