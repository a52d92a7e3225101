#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symdyn {

using Symbol = std::uint8_t;
using SymbolView = std::span<const Symbol>;

/// Finite word over {0, ..., alphabet_size - 1}. Ordered lexicographically.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
    Word(SymbolView symbols) : symbols_(symbols.begin(), symbols.end()) {}
    Word(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}

    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }
    SymbolView view() const noexcept { return symbols_; }
    operator SymbolView() const noexcept { return symbols_; }
    const std::vector<Symbol>& symbols() const noexcept { return symbols_; }

    void push_back(Symbol s) { symbols_.push_back(s); }
    void append(SymbolView tail) { symbols_.insert(symbols_.end(), tail.begin(), tail.end()); }

    Word sub(std::size_t pos, std::size_t len) const {
        return Word(SymbolView(symbols_).subspan(pos, len));
    }

    friend auto operator<=>(const Word&, const Word&) = default;
    friend bool operator==(const Word&, const Word&) = default;

private:
    std::vector<Symbol> symbols_;
};

Word concat(std::initializer_list<SymbolView> parts);

/// Constant word s^len.
Word repeat(Symbol s, std::size_t len);

/// Digits 0-9 then a-z; alphabets above 36 symbols have no text form.
std::string to_string(SymbolView w);
inline std::string to_string(const Word& w) { return to_string(w.view()); }

/// Inverse of to_string. Throws InputError on characters outside the alphabet.
Word parse_word(std::string_view text, int alphabet_size);

/// Throws InputError if any symbol is >= alphabet_size.
void check_symbols(SymbolView w, int alphabet_size);

/// Base-|A| code of a word (most significant symbol first). Caller guarantees
/// alphabet_size^len fits in 64 bits.
std::uint64_t encode(SymbolView w, int alphabet_size);
void decode(std::uint64_t code, int alphabet_size, std::span<Symbol> out);

/// True if alphabet_size^len < 2^63.
bool code_fits(int alphabet_size, std::size_t len);

/// Flat storage for a set of equal-length words (one contiguous buffer).
class WordList {
public:
    WordList() = default;
    explicit WordList(std::size_t word_length) : length_(word_length) {}

    std::size_t word_length() const noexcept { return length_; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

    SymbolView operator[](std::size_t i) const {
        return SymbolView(data_).subspan(i * length_, length_);
    }
    Word word(std::size_t i) const { return Word((*this)[i]); }

    void push_back(SymbolView w) {
        data_.insert(data_.end(), w.begin(), w.end());
        ++count_;
    }

private:
    std::size_t length_ = 0;
    std::size_t count_ = 0;
    std::vector<Symbol> data_;
};

} // namespace symdyn
