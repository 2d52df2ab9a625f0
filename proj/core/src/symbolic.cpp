#include "hmgibbs/symbolic.hpp"

#include <algorithm>
#include <numeric>

#include "hmgibbs/error.hpp"
#include "hmgibbs/numeric.hpp"

namespace hmg {

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw ValidationError("alphabet needs at least two symbols");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i].empty()) throw ValidationError("alphabet label must be nonempty");
        if (!index_.emplace(labels_[i], static_cast<Symbol>(i)).second)
            throw ValidationError("duplicate alphabet label '" + labels_[i] + "'");
    }
}

AlphabetPtr Alphabet::make(std::vector<std::string> labels) {
    return AlphabetPtr(new Alphabet(std::move(labels)));
}

AlphabetPtr Alphabet::digits(std::size_t k) {
    std::vector<std::string> l;
    for (std::size_t i = 0; i < k; ++i) l.push_back(std::to_string(i));
    return make(std::move(l));
}

std::optional<Symbol> Alphabet::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Symbol Alphabet::index_of(std::string_view label) const {
    if (auto s = find(label)) return *s;
    throw ValidationError("unknown symbol '" + std::string(label) + "'");
}

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) noexcept {
    return a == b || (a && b && *a == *b);
}

Word::Word(AlphabetPtr alphabet, std::vector<Symbol> letters)
    : alphabet_(std::move(alphabet)), letters_(std::move(letters)) {
    if (!alphabet_) throw ValidationError("word without alphabet");
    if (letters_.empty()) throw ValidationError("words must have length >= 1");
    for (Symbol s : letters_)
        if (s >= alphabet_->size()) throw ValidationError("letter index out of range");
}

Word Word::parse(AlphabetPtr alphabet, std::string_view text, std::string_view sep) {
    std::vector<Symbol> out;
    if (!sep.empty()) {
        std::size_t pos = 0;
        while (true) {
            std::size_t next = text.find(sep, pos);
            out.push_back(alphabet->index_of(text.substr(pos, next - pos)));
            if (next == std::string_view::npos) break;
            pos = next + sep.size();
        }
    } else {
        std::vector<Symbol> order(alphabet->size());
        std::iota(order.begin(), order.end(), Symbol{0});
        std::stable_sort(order.begin(), order.end(), [&](Symbol a, Symbol b) {
            return alphabet->label(a).size() > alphabet->label(b).size();
        });
        std::size_t pos = 0;
        while (pos < text.size()) {
            bool hit = false;
            for (Symbol s : order) {
                const std::string& l = alphabet->label(s);
                if (text.substr(pos, l.size()) == l) {
                    out.push_back(s);
                    pos += l.size();
                    hit = true;
                    break;
                }
            }
            if (!hit)
                throw ValidationError("cannot parse word '" + std::string(text) + "' at offset " +
                                      std::to_string(pos));
        }
    }
    return Word(std::move(alphabet), std::move(out));
}

Word Word::from_rank(AlphabetPtr alphabet, Rank rank, std::size_t length) {
    std::vector<Symbol> l(length);
    unrank(rank, alphabet->size(), l);
    return Word(std::move(alphabet), std::move(l));
}

Word Word::subword(std::size_t m, std::size_t n) const {
    if (m > n || n >= letters_.size()) throw ValidationError("subword bounds out of range");
    return Word(alphabet_, std::vector<Symbol>(letters_.begin() + m, letters_.begin() + n + 1));
}

Word Word::concat(const Word& tail) const {
    if (!same_alphabet(alphabet_, tail.alphabet_)) throw ValidationError("alphabet mismatch");
    std::vector<Symbol> l = letters_;
    l.insert(l.end(), tail.letters_.begin(), tail.letters_.end());
    return Word(alphabet_, std::move(l));
}

Word Word::periodic_extension(std::size_t length) const {
    std::vector<Symbol> l(length);
    for (std::size_t i = 0; i < length; ++i) l[i] = letters_[i % letters_.size()];
    return Word(alphabet_, std::move(l));
}

Rank Word::rank() const noexcept { return rank_of(letters_, alphabet_->size()); }

std::string Word::to_string(std::string_view sep) const {
    std::string s;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i) s += sep;
        s += alphabet_->label(letters_[i]);
    }
    return s;
}

std::strong_ordering Word::operator<=>(const Word& o) const noexcept {
    return std::lexicographical_compare_three_way(letters_.begin(), letters_.end(),
                                                  o.letters_.begin(), o.letters_.end());
}

Rank rank_of(std::span<const Symbol> letters, std::size_t k) noexcept {
    Rank r = 0;
    for (Symbol s : letters) r = r * k + s;
    return r;
}

void unrank(Rank rank, std::size_t k, std::span<Symbol> out) noexcept {
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = static_cast<Symbol>(rank % k);
        rank /= k;
    }
}

unsigned long long word_count(std::size_t k, std::size_t n, const EnumerationLimits& lim) {
    unsigned long long c = 0;
    if (!checked_pow(k, static_cast<unsigned>(n), lim.max_words, c)) {
        double req = 1.0;
        for (std::size_t i = 0; i < n; ++i) req *= static_cast<double>(k);
        throw EnumerationTooLarge("enumeration of " + std::to_string(k) + "^" + std::to_string(n) +
                                      " words exceeds cap " + std::to_string(lim.max_words),
                                  req, static_cast<double>(lim.max_words));
    }
    return c;
}

std::vector<Word> enumerate_words(const AlphabetPtr& alphabet, std::size_t n,
                                  const EnumerationLimits& lim) {
    if (n == 0) throw ValidationError("word length must be >= 1");
    const unsigned long long count = word_count(alphabet->size(), n, lim);
    std::vector<Word> out;
    out.reserve(count);
    for (unsigned long long r = 0; r < count; ++r) out.push_back(Word::from_rank(alphabet, r, n));
    return out;
}

std::vector<Word> periodic_orbit_words(const AlphabetPtr& alphabet, std::size_t p,
                                       const EnumerationLimits& lim) {
    return enumerate_words(alphabet, p, lim);
}

AmalgamationMap::AmalgamationMap(AlphabetPtr source, AlphabetPtr target, std::vector<Symbol> table)
    : source_(std::move(source)), target_(std::move(target)), table_(std::move(table)) {
    if (!source_ || !target_) throw ValidationError("amalgamation map needs both alphabets");
    if (table_.size() != source_->size())
        throw ValidationError("amalgamation table must assign every source symbol");
    if (source_->size() <= target_->size())
        throw ValidationError("amalgamation must merge symbols: |A| > |B| required");
    preimage_.assign(target_->size(), {});
    for (std::size_t a = 0; a < table_.size(); ++a) {
        if (table_[a] >= target_->size()) throw ValidationError("amalgamation image out of range");
        preimage_[table_[a]].push_back(static_cast<Symbol>(a));
    }
    for (std::size_t b = 0; b < preimage_.size(); ++b)
        if (preimage_[b].empty())
            throw ValidationError("amalgamation map is not surjective: target symbol '" +
                                  target_->label(static_cast<Symbol>(b)) + "' has no preimage");
}

AmalgamationMap AmalgamationMap::from_labels(
    AlphabetPtr source, AlphabetPtr target,
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<Symbol> table(source->size());
    std::vector<bool> seen(source->size(), false);
    for (const auto& [a, b] : pairs) {
        Symbol ia = source->index_of(a);
        if (seen[ia]) throw ValidationError("symbol '" + a + "' mapped twice");
        seen[ia] = true;
        table[ia] = target->index_of(b);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw ValidationError("source symbol '" + source->label(static_cast<Symbol>(i)) +
                                  "' is not mapped");
    return AmalgamationMap(std::move(source), std::move(target), std::move(table));
}

Word amalgamate_word(const AmalgamationMap& map, const Word& w) {
    if (!same_alphabet(w.alphabet(), map.source()))
        throw ValidationError("word is not over the amalgamation source alphabet");
    std::vector<Symbol> l(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) l[i] = map(w[i]);
    return Word(map.target(), std::move(l));
}

unsigned long long fiber_size(const AmalgamationMap& map, std::span<const Symbol> b,
                              const EnumerationLimits& lim) {
    unsigned long long n = 1;
    for (Symbol s : b) {
        const unsigned long long f = map.preimage(s).size();
        if (n > lim.max_words / f)
            throw EnumerationTooLarge("fiber exceeds enumeration cap", static_cast<double>(n) * f,
                                      static_cast<double>(lim.max_words));
        n *= f;
    }
    return n;
}

std::vector<std::vector<Symbol>> fiber_letters(const AmalgamationMap& map,
                                               std::span<const Symbol> b,
                                               const EnumerationLimits& lim) {
    const unsigned long long count = fiber_size(map, b, lim);
    std::vector<std::vector<Symbol>> out;
    out.reserve(count);
    std::vector<std::size_t> digit(b.size(), 0);
    for (unsigned long long c = 0; c < count; ++c) {
        std::vector<Symbol> l(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) l[i] = map.preimage(b[i])[digit[i]];
        out.push_back(std::move(l));
        for (std::size_t i = b.size(); i-- > 0;) {
            if (++digit[i] < map.preimage(b[i]).size()) break;
            digit[i] = 0;
        }
    }
    return out;
}

std::vector<Word> fiber(const AmalgamationMap& map, const Word& b, const EnumerationLimits& lim) {
    if (!same_alphabet(b.alphabet(), map.target()))
        throw ValidationError("word is not over the amalgamation target alphabet");
    std::vector<Word> out;
    for (auto& l : fiber_letters(map, b.letters(), lim)) out.emplace_back(map.source(), std::move(l));
    return out;
}

}  // namespace hmg
