#pragma once

// Exact partition / overpartition numbers and their forward differences.
//
// p(n) is produced by Euler's pentagonal recurrence and pbar(n) by the
// theta-series recurrence pbar(n) = 2 * sum_{j>=1} (-1)^{j+1} pbar(n - j^2).
// Everything here is integer arithmetic; nothing is ever rounded.

#include <gmpxx.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <unistd.h>

#include "parti/digest.hpp"
#include "parti/errors.hpp"

namespace parti {

using BigInt = mpz_class;

enum class BaseSequence { Partition, Overpartition };

inline constexpr std::string_view base_tag(BaseSequence b) {
  return b == BaseSequence::Partition ? "p" : "pbar";
}

inline BaseSequence parse_base(std::string_view s) {
  if (s == "p") return BaseSequence::Partition;
  if (s == "pbar") return BaseSequence::Overpartition;
  throw UsageError("unknown base sequence '" + std::string(s) + "' (expected p or pbar)");
}

inline constexpr int kMaxDiffOrder = 16;

// A base sequence together with a forward-difference order k.
struct SeqExpr {
  BaseSequence base = BaseSequence::Partition;
  int diff_order = 0;

  SeqExpr() = default;
  SeqExpr(BaseSequence b, int k) : base(b), diff_order(k) {
    if (k < 0 || k > kMaxDiffOrder)
      throw UsageError("difference order must lie in 0.." + std::to_string(kMaxDiffOrder));
  }
  friend bool operator==(const SeqExpr&, const SeqExpr&) = default;
};

// Binomial coefficient C(n, k) as a big integer.
inline BigInt binomial(long n, long k) {
  BigInt r;
  if (k < 0 || k > n) return 0;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// Replace `v` by its k-th forward difference in place; the result has
// v.size() - k entries.
inline void forward_difference_inplace(std::vector<BigInt>& v, int k) {
  for (int pass = 0; pass < k && !v.empty(); ++pass) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
    v.pop_back();
  }
}

// Contiguous exact values f(0..max_n) of one base sequence. Append-only;
// once extension returns, the stored values are never modified again, so a
// const SeqCache may be shared by concurrent readers.
class SeqCache {
public:
  explicit SeqCache(BaseSequence base) : base_(base), values_{BigInt(1)} {}

  BaseSequence base() const { return base_; }
  long max_n() const { return static_cast<long>(values_.size()) - 1; }
  std::span<const BigInt> values() const { return values_; }

  // Ensure values 0..up_to are present. Idempotent; existing values untouched.
  void extend(long up_to) {
    if (up_to < 0) throw UsageError("extend: up_to must be nonnegative");
    if (up_to <= max_n()) return;
    values_.reserve(static_cast<std::size_t>(up_to) + 1);
    if (base_ == BaseSequence::Partition)
      extend_partition(up_to);
    else
      extend_overpartition(up_to);
  }

  const BigInt& value(long n) const {
    if (n < 0) throw UsageError("base_value: negative index " + std::to_string(n));
    if (n > max_n())
      throw CoverageError("base_value: index " + std::to_string(n) + " beyond cache max_n=" +
                          std::to_string(max_n()) + "; extend the cache first");
    return values_[static_cast<std::size_t>(n)];
  }

  // sum_{j=0..k} (-1)^{k-j} C(k,j) f(n+j)
  BigInt diff_value(int k, long n) const {
    check_diff(k, n, 1);
    BigInt acc = 0;
    for (int j = 0; j <= k; ++j) {
      BigInt term = binomial(k, j) * values_[static_cast<std::size_t>(n + j)];
      if ((k - j) % 2 == 0)
        acc += term;
      else
        acc -= term;
    }
    return acc;
  }

  // Element i is Δ^k f(n+i), i < len. Computed by iterated differencing.
  std::vector<BigInt> diff_window(int k, long n, long len) const {
    if (len < 1) throw UsageError("diff_window: len must be >= 1");
    check_diff(k, n, len);
    std::vector<BigInt> w(values_.begin() + n, values_.begin() + n + len + k);
    forward_difference_inplace(w, k);
    return w;
  }

  // Serialized payload: one "<n>\t<value>\n" line per index.
  std::string payload() const {
    std::string out;
    out.reserve(values_.size() * (values_.back().get_str().size() / 2 + 8));
    for (std::size_t n = 0; n < values_.size(); ++n) {
      out += std::to_string(n);
      out += '\t';
      out += values_[n].get_str();
      out += '\n';
    }
    return out;
  }

  std::string payload_hash() const { return sha256_hex(payload()); }

  std::string serialize() const {
    std::string body = payload();
    std::string out = "#partition-cache v1 base=" + std::string(base_tag(base_)) +
                      " max_n=" + std::to_string(max_n()) + "\n#sha256=" + sha256_hex(body) + "\n";
    out += body;
    return out;
  }

  // Parse a serialized cache, validating header, contiguity and digest.
  static SeqCache deserialize(std::string_view text) {
    auto next_line = [&](std::size_t& pos) -> std::string_view {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) throw FormatError("cache: truncated header");
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      return line;
    };
    std::size_t pos = 0;
    std::string_view header = next_line(pos);
    constexpr std::string_view magic = "#partition-cache v1 base=";
    if (header.substr(0, magic.size()) != magic) throw FormatError("cache: bad magic line");
    std::string_view rest = header.substr(magic.size());
    std::size_t sp = rest.find(' ');
    if (sp == std::string_view::npos) throw FormatError("cache: malformed header");
    BaseSequence base;
    try {
      base = parse_base(rest.substr(0, sp));
    } catch (const UsageError&) {
      throw FormatError("cache: unknown base in header");
    }
    std::string_view mx = rest.substr(sp + 1);
    if (mx.substr(0, 6) != "max_n=") throw FormatError("cache: malformed header");
    long max_n = parse_index(mx.substr(6));

    std::string_view hash_line = next_line(pos);
    if (hash_line.substr(0, 8) != "#sha256=" || hash_line.size() != 8 + 64)
      throw FormatError("cache: malformed digest line");
    std::string_view expected = hash_line.substr(8);
    for (char c : expected)
      if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
        throw FormatError("cache: digest is not lowercase hex");

    std::string_view body = text.substr(pos);
    SeqCache cache(base);
    cache.values_.clear();
    cache.values_.reserve(static_cast<std::size_t>(max_n) + 1);
    std::size_t p = 0;
    long expect_n = 0;
    while (p < body.size()) {
      std::size_t nl = body.find('\n', p);
      if (nl == std::string_view::npos) throw FormatError("cache: last line not newline-terminated");
      std::string_view line = body.substr(p, nl - p);
      p = nl + 1;
      std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos) throw FormatError("cache: missing tab separator");
      long n = parse_index(line.substr(0, tab));
      if (n != expect_n)
        throw FormatError("cache: expected index " + std::to_string(expect_n) + ", found " +
                          std::to_string(n));
      std::string_view digits = line.substr(tab + 1);
      if (digits.empty()) throw FormatError("cache: empty value");
      for (char c : digits)
        if (c < '0' || c > '9') throw FormatError("cache: non-decimal value at index " + std::to_string(n));
      cache.values_.emplace_back(std::string(digits), 10);
      ++expect_n;
    }
    if (expect_n != max_n + 1)
      throw FormatError("cache: header says max_n=" + std::to_string(max_n) + " but found " +
                        std::to_string(expect_n) + " entries");
    if (cache.values_.front() != 1) throw FormatError("cache: value at index 0 must be 1");
    if (sha256_hex(body) != expected) throw IntegrityError("cache: payload digest mismatch");
    return cache;
  }

  // Atomic save: write a sibling temp file, then rename over the target.
  void save(const std::filesystem::path& path) const {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw UsageError("cache: cannot write " + tmp.string());
      const std::string text = serialize();
      out.write(text.data(), static_cast<std::streamsize>(text.size()));
      if (!out) throw UsageError("cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

  static SeqCache load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cache: cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
  }

private:
  static long parse_index(std::string_view s) {
    if (s.empty() || s.size() > 18) throw FormatError("cache: bad integer field");
    long v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') throw FormatError("cache: bad integer field");
      v = v * 10 + (c - '0');
    }
    return v;
  }

  void check_diff(int k, long n, long len) const {
    if (k < 0 || k > kMaxDiffOrder)
      throw UsageError("difference order must lie in 0.." + std::to_string(kMaxDiffOrder));
    if (n < 0) throw UsageError("negative index " + std::to_string(n));
    if (n + k + len - 1 > max_n())
      throw CoverageError("cache covers 0.." + std::to_string(max_n()) + " but index " +
                          std::to_string(n + k + len - 1) + " is needed; extend the cache first");
  }

  void extend_partition(long up_to) {
    BigInt plus, minus;
    for (long n = max_n() + 1; n <= up_to; ++n) {
      plus = 0;
      minus = 0;
      for (long k = 1;; ++k) {
        long g1 = k * (3 * k - 1) / 2;
        if (g1 > n) break;
        long g2 = g1 + k;
        BigInt& acc = (k % 2 == 1) ? plus : minus;
        acc += values_[static_cast<std::size_t>(n - g1)];
        if (g2 <= n) acc += values_[static_cast<std::size_t>(n - g2)];
      }
      values_.push_back(plus - minus);
    }
  }

  void extend_overpartition(long up_to) {
    BigInt plus, minus;
    for (long n = max_n() + 1; n <= up_to; ++n) {
      plus = 0;
      minus = 0;
      for (long j = 1; j * j <= n; ++j) {
        BigInt& acc = (j % 2 == 1) ? plus : minus;
        acc += values_[static_cast<std::size_t>(n - j * j)];
      }
      BigInt v = plus - minus;
      v *= 2;
      values_.push_back(std::move(v));
    }
  }

  BaseSequence base_;
  std::vector<BigInt> values_;
};

// Functional form of SeqCache::extend.
inline SeqCache extend_cache(SeqCache cache, long up_to) {
  cache.extend(up_to);
  return cache;
}

inline std::filesystem::path cache_file(const std::filesystem::path& dir, BaseSequence base) {
  return dir / (std::string(base_tag(base)) + ".cache");
}

// Load the cache for `base` from `dir` (if present), extend to `up_to`, and
// persist it again when anything was added. Without a directory the cache
// lives in memory only.
inline SeqCache open_cache(const std::optional<std::filesystem::path>& dir, BaseSequence base,
                           long up_to) {
  SeqCache cache(base);
  if (dir) {
    auto path = cache_file(*dir, base);
    if (std::filesystem::exists(path)) cache = SeqCache::load(path);
    if (cache.base() != base) throw FormatError("cache: " + path.string() + " holds the wrong base");
  }
  long before = cache.max_n();
  cache.extend(up_to);
  if (dir && cache.max_n() != before) {
    std::filesystem::create_directories(*dir);
    cache.save(cache_file(*dir, base));
  }
  return cache;
}

} // namespace parti
