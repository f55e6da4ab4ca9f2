#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geodesics {

/// One generator or its inverse. Ordered with all generators before all
/// inverses: a < b < c < d < A < B < C < D.
struct Letter {
  std::uint8_t generator = 0;
  bool inverted = false;

  constexpr Letter inverse() const noexcept { return {generator, !inverted}; }

  friend constexpr bool operator==(Letter, Letter) noexcept = default;
  friend constexpr std::strong_ordering operator<=>(Letter x, Letter y) noexcept {
    if (x.inverted != y.inverted) return x.inverted <=> y.inverted;
    return x.generator <=> y.generator;
  }

  /// 'a'+k for generator k, 'A'+k for its inverse.
  char ascii() const noexcept;
  static Letter from_ascii(char c);
};

using Letters = std::vector<Letter>;

/// Freely reduced word.
class Word {
 public:
  Word() = default;
  explicit Word(std::span<const Letter> letters);

  static Word parse(std::string_view ascii);

  const Letters& letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }

  Word inverse() const;
  std::string str() const;

  friend Word operator*(const Word& lhs, const Word& rhs);
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& x, const Word& y) { return x.letters_ <=> y.letters_; }

 private:
  Letters letters_;
};

/// Nonempty cyclically reduced word, read up to rotation.
class CyclicWord {
 public:
  /// Throws std::invalid_argument when empty or not cyclically reduced.
  explicit CyclicWord(Letters letters);

  static CyclicWord parse(std::string_view ascii);

  const Letters& letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  /// True when produced by canonical_form.
  bool canonical() const noexcept { return canonical_; }

  CyclicWord rotated(std::size_t k) const;
  CyclicWord inverse() const;
  Word as_word() const { return Word(letters_); }
  std::string str() const;

  friend bool operator==(const CyclicWord& x, const CyclicWord& y) {
    return x.letters_ == y.letters_;
  }
  friend auto operator<=>(const CyclicWord& x, const CyclicWord& y) {
    return x.letters_ <=> y.letters_;
  }

 private:
  friend CyclicWord mark_canonical(CyclicWord w);
  Letters letters_;
  bool canonical_ = false;
};

/// Either the genus-g surface group with the opposite-side-pairing relator
/// a_1 ... a_2g a_1^-1 ... a_2g^-1, or a free group of the given rank.
class SurfacePresentation {
 public:
  static SurfacePresentation surface(int genus);
  static SurfacePresentation free_group(int rank);

  bool is_surface() const noexcept { return genus_ > 0; }
  int genus() const noexcept { return genus_; }
  int free_rank() const noexcept { return free_rank_; }
  /// 2g in surface mode, the rank in free mode.
  int generator_count() const noexcept { return is_surface() ? 2 * genus_ : free_rank_; }
  const std::optional<CyclicWord>& relator() const noexcept { return relator_; }

  /// Stable identifier written into census headers and reports.
  std::string describe() const;
  static SurfacePresentation from_description(std::string_view text);

  /// Throws std::invalid_argument if a letter uses an unknown generator.
  void validate(std::span<const Letter> letters) const;

  friend bool operator==(const SurfacePresentation&, const SurfacePresentation&) = default;

 private:
  int genus_ = 0;
  int free_rank_ = 0;
  std::optional<CyclicWord> relator_;
};

struct ConjugacyClass {
  CyclicWord representative;
  int n = 0;  // word length |gamma|
  bool primitive = true;
  CyclicWord root;
  int power = 1;
};

struct PrimitiveDecomposition {
  bool primitive = true;
  CyclicWord root;
  int power = 1;
};

Word free_reduce(std::span<const Letter> letters);

/// Strips inverse prefix/suffix pairs. nullopt means the word was trivial.
std::optional<CyclicWord> cyclic_reduce(const Word& w);

/// Cyclic Dehn reduction: replaces any cyclic subword longer than half the
/// relator by the inverse of the complementary piece until none remains.
/// nullopt means the class is trivial. Identity in free mode.
std::optional<CyclicWord> dehn_reduce_cyclic(const CyclicWord& cw, const SurfacePresentation& p);

/// Linear Dehn reduction. Returns the empty word iff w represents 1.
Word dehn_reduce(const Word& w, const SurfacePresentation& p);

/// Shortest cyclic word conjugate to cw. Beyond Dehn steps this applies
/// chain moves: a row of relator cells glued edge to edge whose outer side
/// runs along the word can be traded for its inner side. Dehn-reduced words
/// such as abcdbcdAb (conjugate to dcbdcbb) are not shortest without them.
/// Throws std::invalid_argument for the identity class.
CyclicWord geodesic_reduce_cyclic(const CyclicWord& cw, const SurfacePresentation& p);

/// Lexicographically least rotation; in surface mode the least over every
/// shortest cyclic word of the class. Distinct shortest words of one class
/// are linked by length-preserving chain moves, exact-half swaps (abcd to
/// dcba) and closed rows such as bcd to dcb among them.
CyclicWord canonical_form(const CyclicWord& cw, const SurfacePresentation& p);

PrimitiveDecomposition is_primitive(const CyclicWord& cw);

struct EnumerationOptions {
  int workers = 0;  // 0: hardware concurrency
  std::size_t memory_budget_bytes = std::size_t{4} << 30;
  std::size_t bytes_per_class = 64;
};

/// Upper bound on the number of classes with |gamma| <= n_max.
double estimate_class_count(const SurfacePresentation& p, int n_max);

/// Throws MemoryBudgetExceeded if the estimate does not fit the budget.
void check_memory_budget(const SurfacePresentation& p, int n_max, const EnumerationOptions& opts);

/// Every nontrivial conjugacy class with |gamma| <= n_max exactly once,
/// directed, ordered by (n, canonical representative).
std::vector<ConjugacyClass> enumerate_classes(const SurfacePresentation& p, int n_max,
                                              const EnumerationOptions& opts = {});

/// Streaming form of enumerate_classes; the sink runs on the calling thread
/// in the same order.
void for_each_class(const SurfacePresentation& p, int n_max,
                    const std::function<void(const ConjugacyClass&)>& sink,
                    const EnumerationOptions& opts = {});

// ---------------------------------------------------------------------------
// Low-level necklace engine shared by the group enumerator and the periodic
// orbit enumerator of subshifts. Letters are small integer codes; for group
// alphabets code(x) = generator for x, rank + generator for x^-1, which
// matches the Letter ordering.

std::uint8_t letter_code(Letter x, int rank) noexcept;
Letter code_letter(std::uint8_t code, int rank) noexcept;

struct RawClass {
  std::span<const std::uint8_t> codes;  // canonical representative
  int period = 0;                       // length of the primitive root
};

class NecklaceEnumerator {
 public:
  /// Conjugacy classes of the group presentation.
  NecklaceEnumerator(const SurfacePresentation& p, int n_max);
  /// Periodic orbits of the subshift with 0-1 transition matrix `allowed`
  /// (row-major, k x k).
  NecklaceEnumerator(int k, std::vector<std::uint8_t> allowed, int n_max);

  int alphabet_size() const noexcept { return alphabet_; }
  int n_max() const noexcept { return n_max_; }

  /// Shards partition the output. Shard 0 holds the words shorter than the
  /// prefix length, the rest one admissible prefix each, in lex order.
  std::size_t shard_count() const noexcept { return prefixes_.size() + 1; }

  /// Emits the shard's classes in lex order within each length.
  void run_shard(std::size_t shard, const std::function<void(const RawClass&)>& visit) const;

 private:
  void descend(std::vector<std::uint8_t>& a, int t, int p, int run_fwd, int run_bwd, int stop_below,
               const std::function<void(const RawClass&)>& visit) const;
  bool step_allowed(std::uint8_t prev, std::uint8_t next) const noexcept {
    return allowed_[static_cast<std::size_t>(prev) * alphabet_ + next] != 0;
  }
  void emit_if_class(std::vector<std::uint8_t>& a, int t, int p,
                     const std::function<void(const RawClass&)>& visit) const;
  bool orbit_canonical(const std::vector<std::uint8_t>& w) const;

  int alphabet_ = 0;
  int n_max_ = 0;
  std::vector<std::uint8_t> allowed_;
  // Relator chains (surface mode): successor of each code along R and R^-1.
  bool surface_ = false;
  int half_ = 0;
  int relator_length_ = 0;
  std::vector<std::uint8_t> succ_fwd_;
  std::vector<std::uint8_t> succ_bwd_;
  std::vector<std::uint8_t> inverse_;
  int prefix_length_ = 0;
  std::vector<std::vector<std::uint8_t>> prefixes_;
};

}  // namespace geodesics
