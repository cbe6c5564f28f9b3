#include "lexrl/text.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace lexrl {

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> pieces;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        const std::string_view piece = text.substr(start, pos - start);
        pieces.emplace_back(trim(piece));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return pieces;
}

double parse_double(std::string_view text, const std::string& context) {
    const std::string owned{trim(text)};
    if (owned.empty()) {
        throw std::invalid_argument(context + ": empty number");
    }
    char* end = nullptr;
    const double value = std::strtod(owned.c_str(), &end);
    if (end != owned.c_str() + owned.size()) {
        throw std::invalid_argument(context + ": cannot parse '" + owned + "' as a number");
    }
    return value;
}

long long parse_int(std::string_view text, const std::string& context) {
    const std::string owned{trim(text)};
    if (owned.empty()) {
        throw std::invalid_argument(context + ": empty integer");
    }
    char* end = nullptr;
    const long long value = std::strtoll(owned.c_str(), &end, 10);
    if (end != owned.c_str() + owned.size()) {
        throw std::invalid_argument(context + ": cannot parse '" + owned + "' as an integer");
    }
    return value;
}

}  // namespace lexrl
