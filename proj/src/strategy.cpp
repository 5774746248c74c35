#include <stickbreak/strategy.hpp>

#include <cmath>

namespace stickbreak
{

std::vector<double> Strategy::partition(std::size_t t) const
{
    if (t == 0 || t > length()) {
        throw std::out_of_range("partition index out of range");
    }
    std::vector<double> parts{1.0};
    parts.reserve(t);
    for (std::size_t i = 0; i + 1 < t; ++i) {
        const auto &s = splits_[i];
        parts[s.target] = s.left;
        parts.push_back(s.right);
    }
    return parts;
}

std::optional<std::string> Strategy::validate(double rel_tol) const
{
    std::vector<double> parts{1.0};
    parts.reserve(length());
    for (std::size_t i = 0; i < splits_.size(); ++i) {
        const auto &s = splits_[i];
        const auto step = std::to_string(i + 1);
        if (s.target >= parts.size()) {
            return "split " + step + " targets piece " + std::to_string(s.target) + " of "
                   + std::to_string(parts.size());
        }
        if (!(s.left > 0) || !(s.right > 0)) {
            return "split " + step + " produces a non-positive piece";
        }
        const double parent = parts[s.target];
        if (std::abs(s.left + s.right - parent) > rel_tol * parent) {
            return "split " + step + " pieces do not sum to the parent length";
        }
        parts[s.target] = s.left;
        parts.push_back(s.right);
    }
    return std::nullopt;
}

std::vector<QNumber> ExactStrategy::partition(std::size_t t) const
{
    if (t == 0 || t > length()) {
        throw std::out_of_range("partition index out of range");
    }
    std::vector<QNumber> parts{total_};
    parts.reserve(t);
    for (std::size_t i = 0; i + 1 < t; ++i) {
        const auto &s = splits_[i];
        parts[s.target] = s.left;
        parts.push_back(s.right);
    }
    return parts;
}

std::optional<std::string> ExactStrategy::validate() const
{
    if (sign(total_) <= 0) {
        return std::string("total length is not positive");
    }
    std::vector<QNumber> parts{total_};
    for (std::size_t i = 0; i < splits_.size(); ++i) {
        const auto &s = splits_[i];
        const auto step = std::to_string(i + 1);
        if (s.target >= parts.size()) {
            return "split " + step + " targets piece " + std::to_string(s.target) + " of "
                   + std::to_string(parts.size());
        }
        if (sign(s.left) <= 0 || sign(s.right) <= 0) {
            return "split " + step + " produces a non-positive piece";
        }
        if (s.left + s.right != parts[s.target]) {
            return "split " + step + " pieces do not sum to the parent length";
        }
        parts[s.target] = s.left;
        parts.push_back(s.right);
    }
    return std::nullopt;
}

Strategy ExactStrategy::to_float() const
{
    const double total = stickbreak::to_float(total_, 1e-15);
    std::vector<Strategy::Split> out;
    out.reserve(splits_.size());
    for (const auto &s : splits_) {
        out.push_back({s.target, stickbreak::to_float(s.left, 1e-15) / total,
                       stickbreak::to_float(s.right, 1e-15) / total});
    }
    return Strategy(std::move(out));
}

} // namespace stickbreak
