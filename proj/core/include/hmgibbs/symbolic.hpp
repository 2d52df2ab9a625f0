#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hmg {

using Symbol = std::uint32_t;
using Rank = std::uint64_t;

class Alphabet;
using AlphabetPtr = std::shared_ptr<const Alphabet>;

/// Ordered set of distinct symbol labels. The order fixes lexicographic word order.
class Alphabet {
public:
    static AlphabetPtr make(std::vector<std::string> labels);
    /// Labels "0", "1", ..., "k-1".
    static AlphabetPtr digits(std::size_t k);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::string& label(Symbol s) const { return labels_.at(s); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::optional<Symbol> find(std::string_view label) const;
    /// Throws ValidationError for unknown labels.
    Symbol index_of(std::string_view label) const;

    bool operator==(const Alphabet& o) const noexcept { return labels_ == o.labels_; }

private:
    explicit Alphabet(std::vector<std::string> labels);
    std::vector<std::string> labels_;
    std::unordered_map<std::string, Symbol> index_;
};

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) noexcept;

/// Finite nonempty word over an alphabet.
class Word {
public:
    Word(AlphabetPtr alphabet, std::vector<Symbol> letters);

    /// Splits on `sep`; with an empty separator the labels are matched greedily
    /// (longest label first), which is unambiguous for single-character labels.
    static Word parse(AlphabetPtr alphabet, std::string_view text, std::string_view sep = "");
    static Word from_rank(AlphabetPtr alphabet, Rank rank, std::size_t length);

    std::size_t size() const noexcept { return letters_.size(); }
    Symbol operator[](std::size_t i) const noexcept { return letters_[i]; }
    const std::vector<Symbol>& letters() const noexcept { return letters_; }
    const AlphabetPtr& alphabet() const noexcept { return alphabet_; }

    /// w_m^n, both ends inclusive.
    Word subword(std::size_t m, std::size_t n) const;
    Word concat(const Word& tail) const;
    /// First `length` letters of the periodic point w^∞.
    Word periodic_extension(std::size_t length) const;
    Rank rank() const noexcept;
    std::string to_string(std::string_view sep = "") const;

    bool operator==(const Word& o) const noexcept { return letters_ == o.letters_; }
    std::strong_ordering operator<=>(const Word& o) const noexcept;

private:
    AlphabetPtr alphabet_;
    std::vector<Symbol> letters_;
};

/// Lexicographic base-k rank, first letter most significant.
Rank rank_of(std::span<const Symbol> letters, std::size_t k) noexcept;
void unrank(Rank rank, std::size_t k, std::span<Symbol> out) noexcept;

struct EnumerationLimits {
    unsigned long long max_words = 10'000'000ULL;
};

/// k^n, throwing EnumerationTooLarge above the cap.
unsigned long long word_count(std::size_t k, std::size_t n, const EnumerationLimits& lim = {});

std::vector<Word> enumerate_words(const AlphabetPtr& alphabet, std::size_t n,
                                  const EnumerationLimits& lim = {});

/// Generating words of Per_p, one per point (non-minimal periods included).
std::vector<Word> periodic_orbit_words(const AlphabetPtr& alphabet, std::size_t p,
                                       const EnumerationLimits& lim = {});

/// Letter-wise surjection A -> B with |A| > |B| >= 2.
class AmalgamationMap {
public:
    AmalgamationMap(AlphabetPtr source, AlphabetPtr target, std::vector<Symbol> table);
    static AmalgamationMap from_labels(AlphabetPtr source, AlphabetPtr target,
                                       const std::vector<std::pair<std::string, std::string>>& pairs);

    const AlphabetPtr& source() const noexcept { return source_; }
    const AlphabetPtr& target() const noexcept { return target_; }
    Symbol operator()(Symbol a) const { return table_.at(a); }
    const std::vector<Symbol>& table() const noexcept { return table_; }
    /// Sorted preimage of one target symbol.
    const std::vector<Symbol>& preimage(Symbol b) const { return preimage_.at(b); }

private:
    AlphabetPtr source_, target_;
    std::vector<Symbol> table_;
    std::vector<std::vector<Symbol>> preimage_;
};

Word amalgamate_word(const AmalgamationMap& map, const Word& w);

/// Product of preimage sizes along b, throwing above the cap.
unsigned long long fiber_size(const AmalgamationMap& map, std::span<const Symbol> b,
                              const EnumerationLimits& lim = {});

/// All preimage words of b in lexicographic order.
std::vector<Word> fiber(const AmalgamationMap& map, const Word& b,
                        const EnumerationLimits& lim = {});

/// Fiber letters only, as flat rows of length b.size().
std::vector<std::vector<Symbol>> fiber_letters(const AmalgamationMap& map,
                                               std::span<const Symbol> b,
                                               const EnumerationLimits& lim = {});

}  // namespace hmg
