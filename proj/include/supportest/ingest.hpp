#pragma once

// Ingestion: bytes -> tokens -> Histogram -> Fingerprint, in one streaming pass.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace supportest {

using SymbolId = std::uint64_t;
using Count = std::uint64_t;

/// Sparse symbol -> count map. Every stored count is >= 1 and the counts sum
/// to n. Entries are kept sorted by symbol id.
class Histogram {
 public:
  struct Entry {
    SymbolId symbol;
    Count count;
    bool operator==(const Entry&) const = default;
  };

  Histogram() = default;

  /// Takes arbitrary (symbol, count) pairs; zero counts are dropped and
  /// repeated symbols are merged.
  static Histogram from_entries(std::vector<Entry> entries);
  /// Symbol id = index into `counts`; zero entries are skipped.
  static Histogram from_dense(std::span<const Count> counts);

  std::span<const Entry> entries() const noexcept { return entries_; }
  Count n() const noexcept { return n_; }
  std::size_t distinct() const noexcept { return entries_.size(); }
  /// 0 when the symbol was not observed.
  Count count(SymbolId symbol) const noexcept;

  bool operator==(const Histogram&) const = default;

 private:
  std::vector<Entry> entries_;
  Count n_ = 0;
};

/// Multiplicity j -> h_j, the number of symbols seen exactly j times.
/// Invariant: sum_j j*h_j == n.
class Fingerprint {
 public:
  Fingerprint() = default;

  /// Zero h_j entries are dropped; j must be >= 1. Throws ParameterError
  /// on j == 0 or when sum_j j*h_j overflows.
  static Fingerprint from_counts(const std::map<Count, Count>& h);

  const std::map<Count, Count>& counts() const noexcept { return h_; }
  /// h_j, or 0 when absent.
  Count at(Count j) const noexcept;
  Count n() const noexcept { return n_; }
  /// Number of distinct observed symbols, sum_j h_j.
  Count distinct() const noexcept { return distinct_; }
  bool empty() const noexcept { return h_.empty(); }

  bool operator==(const Fingerprint&) const = default;

 private:
  std::map<Count, Count> h_;
  Count n_ = 0;
  Count distinct_ = 0;
};

Fingerprint fingerprint_of(const Histogram& histogram);

// ---------------------------------------------------------------------------
// Tokenization

enum class Encoding { kUtf8, kAscii, kLatin1 };

/// Parses "utf-8" / "utf8" / "ascii" / "latin1" / "iso-8859-1" (case-insensitive).
Encoding parse_encoding(std::string_view name);

struct TokenizerConfig {
  bool case_fold = true;
  /// Removes every character that is not a letter or digit.
  bool strip_punctuation = true;
  Encoding encoding = Encoding::kUtf8;
};

/// Incremental whitespace tokenizer. Bytes may be fed in arbitrary chunks
/// (multi-byte sequences may straddle chunk boundaries); each completed
/// token is passed to the sink. Output is normalized to UTF-8.
///
/// Character classes are locale independent: ASCII letters/digits and
/// non-ASCII letters are kept; ASCII punctuation, Latin-1 symbols
/// (U+0080..U+00BF, U+00D7, U+00F7) and the general / CJK punctuation blocks
/// (U+2000..U+206F, U+3000..U+303F) are stripped. Case folding covers ASCII
/// and the Latin-1 uppercase letters.
class Tokenizer {
 public:
  using Sink = std::function<void(std::string_view)>;

  Tokenizer(TokenizerConfig cfg, Sink sink);

  /// Throws DecodeError with the absolute byte offset of the offending byte.
  void feed(std::string_view bytes);
  /// Flushes the pending token. Throws DecodeError on a truncated sequence.
  void finish();

  std::size_t bytes_consumed() const noexcept { return offset_; }

 private:
  void on_code_point(char32_t cp);
  void flush();

  TokenizerConfig cfg_;
  Sink sink_;
  std::string current_;
  std::size_t offset_ = 0;
  // Pending UTF-8 sequence state.
  char32_t pending_cp_ = 0;
  int pending_left_ = 0;
  int pending_len_ = 0;
  std::size_t pending_start_ = 0;
};

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {});

/// Streams `in` through the tokenizer in fixed-size chunks.
void tokenize_stream(std::istream& in, const TokenizerConfig& cfg, const Tokenizer::Sink& sink);

// ---------------------------------------------------------------------------
// Interning and histogram construction

/// Maps symbol strings to dense integer ids in first-seen order.
class SymbolTable {
 public:
  SymbolId intern(std::string_view symbol);
  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(SymbolId id) const { return names_.at(id); }
  /// Returns size() when the symbol is unknown.
  SymbolId find(std::string_view symbol) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, SymbolId, Hash, std::equal_to<>> ids_;
  std::vector<std::string> names_;
};

/// Single-pass counter: memory is proportional to the number of distinct
/// symbols, not to the stream length.
class HistogramBuilder {
 public:
  void add(std::string_view token);
  void add_id(SymbolId id);
  Histogram histogram() const;
  const SymbolTable& symbols() const noexcept { return symbols_; }
  Count n() const noexcept { return n_; }

 private:
  SymbolTable symbols_;
  std::vector<Count> counts_;
  Count n_ = 0;
};

/// Symbol ids follow first-occurrence order.
Histogram build_histogram(std::span<const std::string> tokens);
Histogram build_histogram(std::span<const SymbolId> tokens);

/// tokenize -> build_histogram -> fingerprint_of over a stream.
Fingerprint fingerprint_stream(std::istream& in, const TokenizerConfig& cfg = {});

// ---------------------------------------------------------------------------
// Fingerprint files: one "j h_j" pair per line, j strictly increasing,
// h_j >= 1, '#' starts a comment line.

Fingerprint parse_fingerprint(std::string_view text);
std::string format_fingerprint(const Fingerprint& fp);
Fingerprint read_fingerprint_file(const std::string& path);
void write_fingerprint_file(const Fingerprint& fp, const std::string& path);

// ---------------------------------------------------------------------------
// Corpora and resampling

enum class Unit { kWord, kParagraph };

Unit parse_unit(std::string_view name);

/// Token stream partitioned into units. Paragraphs are separated by one or
/// more blank (whitespace-only) lines.
struct Corpus {
  std::vector<SymbolId> tokens;
  /// unit_starts[u] is the index of the first token of paragraph u.
  std::vector<std::size_t> paragraph_starts;
  SymbolTable symbols;

  std::size_t unit_count(Unit unit) const noexcept;
};

Corpus read_corpus(std::istream& in, const TokenizerConfig& cfg = {});

/// Draws ceil(fraction * unit_count) units uniformly with replacement and
/// concatenates them. Deterministic given the seed.
std::vector<SymbolId> resample(const Corpus& corpus, double fraction, Unit unit,
                               std::uint64_t seed);

}  // namespace supportest
