#include "symdyn/word.hpp"

#include "symdyn/error.hpp"

namespace symdyn {

namespace {
constexpr std::string_view kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";
}

Word concat(std::initializer_list<SymbolView> parts) {
    std::vector<Symbol> out;
    std::size_t total = 0;
    for (auto p : parts) total += p.size();
    out.reserve(total);
    for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
    return Word(std::move(out));
}

Word repeat(Symbol s, std::size_t len) { return Word(std::vector<Symbol>(len, s)); }

std::string to_string(SymbolView w) {
    std::string out;
    out.reserve(w.size());
    for (Symbol s : w) {
        if (s >= kDigits.size()) throw InputError("symbol " + std::to_string(s) + " has no text form");
        out.push_back(kDigits[s]);
    }
    return out;
}

Word parse_word(std::string_view text, int alphabet_size) {
    std::vector<Symbol> out;
    out.reserve(text.size());
    for (char c : text) {
        auto pos = kDigits.find(c);
        if (pos == std::string_view::npos || static_cast<int>(pos) >= alphabet_size)
            throw InputError("character '" + std::string(1, c) + "' is not a symbol of an alphabet of size " +
                             std::to_string(alphabet_size));
        out.push_back(static_cast<Symbol>(pos));
    }
    return Word(std::move(out));
}

void check_symbols(SymbolView w, int alphabet_size) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] >= alphabet_size)
            throw InputError("symbol " + std::to_string(w[i]) + " at position " + std::to_string(i) +
                             " outside alphabet of size " + std::to_string(alphabet_size));
    }
}

std::uint64_t encode(SymbolView w, int alphabet_size) {
    std::uint64_t code = 0;
    for (Symbol s : w) code = code * static_cast<std::uint64_t>(alphabet_size) + s;
    return code;
}

void decode(std::uint64_t code, int alphabet_size, std::span<Symbol> out) {
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = static_cast<Symbol>(code % static_cast<std::uint64_t>(alphabet_size));
        code /= static_cast<std::uint64_t>(alphabet_size);
    }
}

bool code_fits(int alphabet_size, std::size_t len) {
    unsigned __int128 v = 1;
    for (std::size_t i = 0; i < len; ++i) {
        v *= static_cast<unsigned>(alphabet_size);
        if (v >= (static_cast<unsigned __int128>(1) << 63)) return false;
    }
    return true;
}

} // namespace symdyn
