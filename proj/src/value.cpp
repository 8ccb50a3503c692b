#include "consicore/value.hpp"

#include <charconv>

namespace consicore {

std::string_view to_string(Sort s) { return s == Sort::Int ? "int" : "str"; }

std::int64_t coerce_int(std::string_view text)
{
    if (text.empty())
        return 0;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+')
        pos = 1;
    if (pos == text.size())
        return 0;
    for (std::size_t i = pos; i < text.size(); ++i)
        if (text[i] < '0' || text[i] > '9')
            return 0;
    // from_chars rejects a leading '+'
    std::string_view digits = text[0] == '+' ? text.substr(1) : text;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
    if (ec != std::errc{} || ptr != digits.data() + digits.size())
        return 0;
    return out;
}

std::int64_t wrap_add(std::int64_t a, std::int64_t b)
{
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

std::int64_t wrap_mul(std::int64_t a, std::int64_t b)
{
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

std::string quote(std::string_view s)
{
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string render_value(const Value &v)
{
    if (const auto *i = std::get_if<std::int64_t>(&v))
        return std::to_string(*i);
    return quote(std::get<std::string>(v));
}

} // namespace consicore
