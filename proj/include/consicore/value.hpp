#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace consicore {

enum class Sort { Int, Str };

std::string_view to_string(Sort s);

/// A concrete runtime value. Integers are 64-bit with wrapping arithmetic.
using Value = std::variant<std::int64_t, std::string>;

inline Sort sort_of(const Value &v) { return std::holds_alternative<std::int64_t>(v) ? Sort::Int : Sort::Str; }

inline Value default_value(Sort s) { return s == Sort::Int ? Value{std::int64_t{0}} : Value{std::string{}}; }

/// Text-to-int coercion: optional sign followed by decimal digits. Anything
/// else, including overflow, yields 0.
std::int64_t coerce_int(std::string_view text);

std::int64_t wrap_add(std::int64_t a, std::int64_t b);
std::int64_t wrap_mul(std::int64_t a, std::int64_t b);

/// Renders ints in decimal and strings quoted with C-style escapes.
std::string render_value(const Value &v);

std::string quote(std::string_view s);

} // namespace consicore
