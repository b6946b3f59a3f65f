// parti-ineq: sequences, inequality scans, table reproduction and
// certificates for partition-type sequences.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "parti/certify.hpp"
#include "parti/operators.hpp"
#include "parti/sequences.hpp"
#include "parti/thresholds.hpp"

namespace fs = std::filesystem;
using namespace parti;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInternal = 2, kMismatch = 3 };

class Caches {
public:
  explicit Caches(std::optional<fs::path> dir) : dir_(std::move(dir)) {}

  const SeqCache& get(BaseSequence b, long up_to) {
    auto it = caches_.find(b);
    if (it == caches_.end()) {
      it = caches_.emplace(b, open_cache(dir_, b, up_to)).first;
    } else if (it->second.max_n() < up_to) {
      it->second.extend(up_to);
      if (dir_) it->second.save(cache_file(*dir_, b));
    }
    return it->second;
  }

  const std::optional<fs::path>& dir() const { return dir_; }

private:
  std::optional<fs::path> dir_;
  std::map<BaseSequence, SeqCache> caches_;
};

std::optional<fs::path> resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char* env = std::getenv("PARTI_INEQ_CACHE"); env && *env) return fs::path(env);
  return std::nullopt;
}

void require_format(const std::string& f, std::initializer_list<std::string_view> allowed) {
  for (auto a : allowed)
    if (f == a) return;
  throw UsageError("unsupported --format '" + f + "'");
}

struct ScanFlags {
  std::string base = "p";
  int diff = 0;
  std::string ineq;
  bool ge = false;
};

void add_scan_flags(CLI::App* cmd, ScanFlags& f) {
  cmd->add_option("--base", f.base, "p or pbar")->required();
  cmd->add_option("--diff", f.diff, "forward-difference order k")->required();
  cmd->add_option("--ineq", f.ineq, "turan2|turan3|laguerre:M|det:M|logc:R|invA|invB|invI")->required();
  cmd->add_flag("--ge", f.ge, "test >= 0 instead of > 0");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact scans and certificates for partition-type inequalities"};
  app.require_subcommand(1);
  std::string cache_flag;
  app.add_option("--cache-dir", cache_flag, "cache directory (default: $PARTI_INEQ_CACHE, else in-memory)");

  // seq
  auto* seq = app.add_subcommand("seq", "print exact values of Δ^k p or Δ^k pbar");
  std::string seq_base, seq_format = "csv";
  int seq_diff = 0;
  long seq_from = 0, seq_to = 0;
  seq->add_option("--base", seq_base)->required();
  seq->add_option("--diff", seq_diff)->default_val(0);
  seq->add_option("--from", seq_from)->required();
  seq->add_option("--to", seq_to)->required();
  seq->add_option("--format", seq_format, "csv or json")->default_val("csv");

  // check
  auto* check = app.add_subcommand("check", "list every n in a range where the inequality fails");
  ScanFlags check_f;
  long check_from = 0, check_to = 0;
  std::string check_format = "json";
  add_scan_flags(check, check_f);
  check->add_option("--from", check_from)->required();
  check->add_option("--to", check_to)->required();
  check->add_option("--format", check_format, "json or csv")->default_val("json");

  // threshold
  auto* thr = app.add_subcommand("threshold", "empirical threshold with safety margin");
  ScanFlags thr_f;
  long thr_nmin = 0, thr_nmax = kDefaultNmax, thr_margin = kDefaultMargin;
  add_scan_flags(thr, thr_f);
  thr->add_option("--nmin", thr_nmin)->default_val(0);
  thr->add_option("--nmax", thr_nmax)->default_val(kDefaultNmax);
  thr->add_option("--margin", thr_margin)->default_val(kDefaultMargin);

  // table
  auto* table = app.add_subcommand("table", "recompute a reference table and compare");
  std::string table_which, table_format = "csv";
  long table_nmax = kDefaultNmax, table_margin = kDefaultMargin;
  int table_kmax = 5, table_mmax = 11;
  table->add_option("--which", table_which, "Lp|Lpbar|Dp|Dpbar|TI")->required();
  table->add_option("--nmax", table_nmax)->default_val(kDefaultNmax);
  table->add_option("--margin", table_margin)->default_val(kDefaultMargin);
  table->add_option("--kmax", table_kmax)->default_val(5);
  table->add_option("--mmax", table_mmax)->default_val(11);
  table->add_option("--format", table_format, "csv or json")->default_val("csv");

  // certify
  auto* cert = app.add_subcommand("certify", "asymptotic certificate plus finite check for a theorem");
  std::string cert_theorem, cert_mode = "sound", cert_out, cert_assign = "parity";
  int cert_digits = kDefaultDigits;
  cert->add_option("--theorem", cert_theorem, "turan-p|turan-pbar|lag2-p|lag2-pbar|det3-p|det3-pbar")->required();
  cert->add_option("--mode", cert_mode, "literal or sound")->default_val("sound");
  cert->add_option("--precision", cert_digits, "decimal digits for π")->default_val(kDefaultDigits);
  cert->add_option("--exp-assignment", cert_assign, "parity or printed (literal mode only)")->default_val("parity");
  cert->add_option("--out", cert_out, "write the certificate JSON here");

  // cache-info
  auto* info = app.add_subcommand("cache-info", "describe and validate cache files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    Caches caches(resolve_cache_dir(cache_flag));

    if (*seq) {
      SeqExpr expr(parse_base(seq_base), seq_diff);
      require_format(seq_format, {"csv", "json"});
      if (seq_from < 0 || seq_from > seq_to) throw UsageError("seq: need 0 <= --from <= --to");
      const auto& c = caches.get(expr.base, seq_to + expr.diff_order);
      auto vals = c.diff_window(expr.diff_order, seq_from, seq_to - seq_from + 1);
      if (seq_format == "csv") {
        std::cout << "n,value\n";
        for (long i = 0; i < static_cast<long>(vals.size()); ++i) std::cout << seq_from + i << ',' << vals[static_cast<std::size_t>(i)].get_str() << '\n';
      } else {
        ojson j;
        j["base"] = std::string(base_tag(expr.base));
        j["diff"] = expr.diff_order;
        ojson arr = ojson::array();
        for (long i = 0; i < static_cast<long>(vals.size()); ++i)
          arr.push_back({{"n", seq_from + i}, {"value", vals[static_cast<std::size_t>(i)].get_str()}});
        j["values"] = std::move(arr);
        std::cout << j.dump(2) << '\n';
      }
      return kOk;
    }

    if (*check) {
      ThresholdQuery q{SeqExpr(parse_base(check_f.base), check_f.diff), IneqKind::parse(check_f.ineq, !check_f.ge),
                       check_from, check_to, 1};
      q.validate();
      require_format(check_format, {"csv", "json"});
      auto r = verify_range(caches.get(q.expr.base, q.base_reach()), q);
      if (check_format == "csv") {
        std::cout << "n\n";
        for (long n : r.failures) std::cout << n << '\n';
      } else {
        ojson j;
        j["query"] = query_to_json(q);
        j["failures"] = r.failures;
        std::cout << j.dump(2) << '\n';
      }
      return kOk;
    }

    if (*thr) {
      ThresholdQuery q{SeqExpr(parse_base(thr_f.base), thr_f.diff), IneqKind::parse(thr_f.ineq, !thr_f.ge), thr_nmin,
                       thr_nmax, thr_margin};
      q.validate();
      auto r = find_threshold(caches.get(q.expr.base, q.base_reach()), q);
      ojson j = report_to_json(r);
      if (q.kind.tag == IneqKind::Tag::Turan2 && r.threshold)
        j["note"] = "window start n; a statement centred at a_n reads threshold + 1";
      std::cout << j.dump(2) << '\n';
      return kOk;
    }

    if (*table) {
      TableId which = parse_table(table_which);
      require_format(table_format, {"csv", "json"});
      TableRange range{1, table_kmax, 1, table_mmax};
      if (table_nmax < 1 || table_margin < 1) throw UsageError("table: --nmax and --margin must be positive");
      const long reach = table_reach(which, range, table_nmax);
      auto t = reproduce_table(
          which, [&](BaseSequence b) -> const SeqCache& { return caches.get(b, reach); }, range, table_nmax,
          table_margin);
      if (table_format == "csv")
        std::cout << table_to_csv(t);
      else
        std::cout << table_to_json(t).dump(2) << '\n';
      return t.mismatches() == 0 ? kOk : kMismatch;
    }

    if (*cert) {
      const auto& preset = find_preset(cert_theorem);
      CertMode mode = parse_mode(cert_mode);
      auto spec = make_spec(preset, mode, cert_digits);
      if (cert_assign == "printed")
        spec.exp_assignment = ExpAssignment::AsPrinted;
      else if (cert_assign != "parity")
        throw UsageError("--exp-assignment must be parity or printed");
      spec.validate();
      auto r = certify_theorem(
          spec, [&](BaseSequence b, long up_to) -> const SeqCache& { return caches.get(b, up_to); },
          preset.threshold);
      ojson j = certificate_to_json(r);
      j["printed_n0"] = preset.printed_n0;
      if (cert_out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        std::ofstream out(cert_out);
        if (!out) throw UsageError("cannot write " + cert_out);
        out << j.dump(2) << '\n';
        std::cout << preset.name << " " << mode_name(mode) << ": y0=" << r.y0.get_d() << " n0=" << r.n0
                  << " threshold=" << r.theorem_threshold << (r.closed ? " closed" : " NOT closed") << '\n';
      }
      return r.closed ? kOk : kInternal;
    }

    if (*info) {
      if (!caches.dir()) throw UsageError("cache-info needs --cache-dir or PARTI_INEQ_CACHE");
      ojson arr = ojson::array();
      for (auto b : {BaseSequence::Partition, BaseSequence::Overpartition}) {
        auto path = cache_file(*caches.dir(), b);
        ojson e;
        e["base"] = std::string(base_tag(b));
        e["path"] = path.string();
        if (!fs::exists(path)) {
          e["present"] = false;
        } else {
          e["present"] = true;
          try {
            auto c = SeqCache::load(path);
            e["valid"] = true;
            e["max_n"] = c.max_n();
            e["sha256"] = c.payload_hash();
          } catch (const Error& err) {
            e["valid"] = false;
            e["error"] = err.what();
          }
        }
        arr.push_back(std::move(e));
      }
      std::cout << arr.dump(2) << '\n';
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
