#include "supportest/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "supportest/error.hpp"
#include "supportest/random.hpp"

namespace supportest {

// ---------------------------------------------------------------------------
// Histogram / Fingerprint

Histogram Histogram::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.symbol < y.symbol; });
  Histogram h;
  h.entries_.reserve(entries.size());
  for (const Entry& e : entries) {
    if (e.count == 0) continue;
    if (!h.entries_.empty() && h.entries_.back().symbol == e.symbol) {
      h.entries_.back().count += e.count;
    } else {
      h.entries_.push_back(e);
    }
    h.n_ += e.count;
  }
  return h;
}

Histogram Histogram::from_dense(std::span<const Count> counts) {
  Histogram h;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    h.entries_.push_back({static_cast<SymbolId>(i), counts[i]});
    h.n_ += counts[i];
  }
  return h;
}

Count Histogram::count(SymbolId symbol) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), symbol,
                             [](const Entry& e, SymbolId s) { return e.symbol < s; });
  return (it != entries_.end() && it->symbol == symbol) ? it->count : 0;
}

Fingerprint Fingerprint::from_counts(const std::map<Count, Count>& h) {
  Fingerprint fp;
  for (const auto& [j, hj] : h) {
    if (j == 0) throw ParameterError("fingerprint multiplicity must be >= 1");
    if (hj == 0) continue;
    Count mass = 0;
    if (__builtin_mul_overflow(j, hj, &mass) || __builtin_add_overflow(fp.n_, mass, &fp.n_)) {
      throw ParameterError("fingerprint sample size overflows 64 bits");
    }
    fp.h_.emplace(j, hj);
    fp.distinct_ += hj;
  }
  return fp;
}

Count Fingerprint::at(Count j) const noexcept {
  auto it = h_.find(j);
  return it == h_.end() ? 0 : it->second;
}

Fingerprint fingerprint_of(const Histogram& histogram) {
  std::map<Count, Count> h;
  for (const auto& e : histogram.entries()) ++h[e.count];
  return Fingerprint::from_counts(h);
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' || cp == U'\v';
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9');
  }
  if (cp <= 0xBF) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  return true;
}

char32_t fold_case(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

Encoding parse_encoding(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "utf-8" || n == "utf8") return Encoding::kUtf8;
  if (n == "ascii" || n == "us-ascii") return Encoding::kAscii;
  if (n == "latin1" || n == "latin-1" || n == "iso-8859-1") return Encoding::kLatin1;
  throw ParameterError("unknown encoding '" + std::string(name) + "'");
}

Tokenizer::Tokenizer(TokenizerConfig cfg, Sink sink) : cfg_(cfg), sink_(std::move(sink)) {}

void Tokenizer::flush() {
  if (!current_.empty()) {
    sink_(current_);
    current_.clear();
  }
}

void Tokenizer::on_code_point(char32_t cp) {
  if (is_space(cp)) {
    flush();
    return;
  }
  if (cfg_.strip_punctuation && !is_word_char(cp)) return;
  append_utf8(current_, cfg_.case_fold ? fold_case(cp) : cp);
}

void Tokenizer::feed(std::string_view bytes) {
  for (std::size_t i = 0; i < bytes.size(); ++i, ++offset_) {
    const auto byte = static_cast<unsigned char>(bytes[i]);
    if (pending_left_ > 0) {
      if ((byte & 0xC0) != 0x80) {
        throw DecodeError(offset_, "expected UTF-8 continuation byte");
      }
      pending_cp_ = (pending_cp_ << 6) | (byte & 0x3F);
      if (--pending_left_ == 0) {
        static constexpr std::array<char32_t, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
        if (pending_cp_ < kMin[pending_len_] || pending_cp_ > 0x10FFFF ||
            (pending_cp_ >= 0xD800 && pending_cp_ <= 0xDFFF)) {
          throw DecodeError(pending_start_, "invalid UTF-8 sequence");
        }
        on_code_point(pending_cp_);
      }
      continue;
    }
    if (byte < 0x80) {
      on_code_point(byte);
      continue;
    }
    switch (cfg_.encoding) {
      case Encoding::kAscii:
        throw DecodeError(offset_, "non-ASCII byte");
      case Encoding::kLatin1:
        on_code_point(byte);
        continue;
      case Encoding::kUtf8:
        break;
    }
    pending_start_ = offset_;
    if ((byte & 0xE0) == 0xC0) {
      pending_cp_ = byte & 0x1F;
      pending_left_ = pending_len_ = 1;
    } else if ((byte & 0xF0) == 0xE0) {
      pending_cp_ = byte & 0x0F;
      pending_left_ = pending_len_ = 2;
    } else if ((byte & 0xF8) == 0xF0) {
      pending_cp_ = byte & 0x07;
      pending_left_ = pending_len_ = 3;
    } else {
      throw DecodeError(offset_, "invalid UTF-8 lead byte");
    }
    ++pending_len_;
  }
}

void Tokenizer::finish() {
  if (pending_left_ > 0) throw DecodeError(pending_start_, "truncated UTF-8 sequence");
  flush();
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
  std::vector<std::string> tokens;
  Tokenizer tok(cfg, [&](std::string_view t) { tokens.emplace_back(t); });
  tok.feed(text);
  tok.finish();
  return tokens;
}

void tokenize_stream(std::istream& in, const TokenizerConfig& cfg, const Tokenizer::Sink& sink) {
  Tokenizer tok(cfg, sink);
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    tok.feed(std::string_view(buffer.data(), got));
  }
  tok.finish();
}

// ---------------------------------------------------------------------------
// Interning

SymbolId SymbolTable::intern(std::string_view symbol) {
  auto it = ids_.find(symbol);
  if (it != ids_.end()) return it->second;
  const SymbolId id = names_.size();
  names_.emplace_back(symbol);
  ids_.emplace(names_.back(), id);
  return id;
}

SymbolId SymbolTable::find(std::string_view symbol) const {
  auto it = ids_.find(symbol);
  return it == ids_.end() ? names_.size() : it->second;
}

void HistogramBuilder::add(std::string_view token) { add_id(symbols_.intern(token)); }

void HistogramBuilder::add_id(SymbolId id) {
  if (id >= counts_.size()) counts_.resize(id + 1, 0);
  ++counts_[id];
  ++n_;
}

Histogram HistogramBuilder::histogram() const { return Histogram::from_dense(counts_); }

Histogram build_histogram(std::span<const std::string> tokens) {
  HistogramBuilder builder;
  for (const auto& t : tokens) builder.add(t);
  return builder.histogram();
}

Histogram build_histogram(std::span<const SymbolId> tokens) {
  HistogramBuilder builder;
  for (SymbolId id : tokens) builder.add_id(id);
  return builder.histogram();
}

Fingerprint fingerprint_stream(std::istream& in, const TokenizerConfig& cfg) {
  HistogramBuilder builder;
  tokenize_stream(in, cfg, [&](std::string_view t) { builder.add(t); });
  return fingerprint_of(builder.histogram());
}

// ---------------------------------------------------------------------------
// Fingerprint files

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\f\v");
  return s.substr(first, last - first + 1);
}

bool parse_u64(std::string_view s, Count& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Fingerprint parse_fingerprint(std::string_view text) {
  std::map<Count, Count> h;
  Count last_j = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) throw ParseError(line_no, "expected 'j h_j'");
    const std::string_view js = line.substr(0, sep);
    const std::string_view hs = trim(line.substr(sep));
    Count j = 0;
    Count hj = 0;
    if (!parse_u64(js, j) || !parse_u64(hs, hj)) {
      throw ParseError(line_no, "expected two non-negative decimal integers");
    }
    if (j == 0) throw FormatError(line_no, "multiplicity must be >= 1");
    if (hj == 0) throw FormatError(line_no, "h_j must be >= 1");
    if (h.contains(j)) throw FormatError(line_no, "duplicate multiplicity " + std::to_string(j));
    if (j < last_j) throw FormatError(line_no, "multiplicities must be strictly increasing");
    last_j = j;
    h.emplace(j, hj);
  }
  try {
    return Fingerprint::from_counts(h);
  } catch (const ParameterError& e) {
    throw FormatError(line_no, e.what());
  }
}

std::string format_fingerprint(const Fingerprint& fp) {
  std::string out;
  for (const auto& [j, hj] : fp.counts()) {
    out += std::to_string(j);
    out += ' ';
    out += std::to_string(hj);
    out += '\n';
  }
  return out;
}

Fingerprint read_fingerprint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_fingerprint(ss.str());
}

void write_fingerprint_file(const Fingerprint& fp, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << format_fingerprint(fp);
  if (!out) throw IoError(path, "write failed");
}

// ---------------------------------------------------------------------------
// Corpora

Unit parse_unit(std::string_view name) {
  const std::string n = lowercase(name);
  if (n == "word") return Unit::kWord;
  if (n == "paragraph") return Unit::kParagraph;
  throw ParameterError("unit must be 'word' or 'paragraph'");
}

std::size_t Corpus::unit_count(Unit unit) const noexcept {
  return unit == Unit::kWord ? tokens.size() : paragraph_starts.size();
}

Corpus read_corpus(std::istream& in, const TokenizerConfig& cfg) {
  Corpus corpus;
  bool in_paragraph = false;
  Tokenizer tok(cfg, [&](std::string_view t) {
    if (!in_paragraph) {
      corpus.paragraph_starts.push_back(corpus.tokens.size());
      in_paragraph = true;
    }
    corpus.tokens.push_back(corpus.symbols.intern(t));
  });
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      in_paragraph = false;
      continue;
    }
    tok.feed(line);
    tok.feed("\n");
  }
  tok.finish();
  return corpus;
}

std::vector<SymbolId> resample(const Corpus& corpus, double fraction, Unit unit,
                               std::uint64_t seed) {
  const std::size_t units = corpus.unit_count(unit);
  if (units == 0) throw EmptyInputError("corpus has no " + std::string(unit == Unit::kWord ? "words" : "paragraphs"));
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("fraction must lie in (0, 1]");
  const double want = fraction * static_cast<double>(units);
  if (want < 1.0) throw ParameterError("fraction * unit count must be >= 1");
  const auto draws = static_cast<std::size_t>(std::ceil(want - 1e-9 * want));

  Rng rng(seed);
  std::vector<SymbolId> out;
  if (unit == Unit::kWord) {
    out.reserve(draws);
    for (std::size_t d = 0; d < draws; ++d) out.push_back(corpus.tokens[rng.below(units)]);
    return out;
  }
  for (std::size_t d = 0; d < draws; ++d) {
    const std::size_t p = rng.below(units);
    const std::size_t begin = corpus.paragraph_starts[p];
    const std::size_t end = p + 1 < units ? corpus.paragraph_starts[p + 1] : corpus.tokens.size();
    out.insert(out.end(), corpus.tokens.begin() + begin, corpus.tokens.begin() + end);
  }
  return out;
}

}  // namespace supportest
