#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symdyn {

/// Integer-indexed real sequence, given either by a closed-form expression in
/// one variable (`n` or `k`, interchangeable) or by an explicit value list.
///
/// Expression grammar: numbers, the index variable, + - * / ^, parentheses and
/// the functions sqrt ln log log2 exp ceil floor abs min max.
class Sequence {
public:
    static Sequence formula(std::string text);
    static Sequence list(std::vector<double> values, std::int64_t first_index);
    static Sequence constant(double value);

    /// Throws InputError when the index lies outside a list's stored range.
    double at(std::int64_t n) const;

    /// Integer value; throws InputError if the value is not an integer.
    std::int64_t at_int(std::int64_t n) const;

    bool defined_at(std::int64_t n) const;
    /// Last stored index of a list; nullopt for formulas.
    std::optional<std::int64_t> last_index() const;
    std::int64_t first_index() const { return first_; }

    const std::string& description() const { return description_; }

    struct Node;

private:
    std::shared_ptr<const Node> expr_;
    std::vector<double> values_;
    std::int64_t first_ = 0;
    std::string description_;
};

} // namespace symdyn
