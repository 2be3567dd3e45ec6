// ggmlab command-line front end. Every subcommand prints CSV to stdout;
// diagnostics go to stderr. Exit codes: 0 ok, 1 failed check (freeze-check),
// 2 usage error, 3 numerical/capacity failure.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ggmlab/canonical.hpp"
#include "ggmlab/gaussian.hpp"
#include "ggmlab/nongauss.hpp"

using namespace ggmlab;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string partition_label(const std::vector<int>& modes) {
  std::string out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) out += '+';
    out += std::to_string(modes[i]);
  }
  return out;
}

// Run fn(i) for i in [0, n) on `jobs` threads; callers index a result buffer.
template <class Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, n);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!failed.exchange(true)) first_error = e.what();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failed.load()) throw NumericalError(first_error);
}

struct SweepRange {
  std::string variable;
  std::vector<double> points;
};

// "VAR=a:b:step" -> inclusive grid; integer variables use integer steps.
SweepRange parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw UsageError("--sweep expects VAR=a:b:step, got '" + text + "'");
  SweepRange out;
  out.variable = text.substr(0, eq);
  double a = 0, b = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text.substr(eq + 1));
  if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' ||
      step <= 0)
    throw UsageError("--sweep expects VAR=a:b:step with step > 0");
  for (double x = a; x <= b + 0.5 * step; x += step) out.points.push_back(x);
  return out;
}

// "m1=2,m2=0" or "m1=0..10,m2=1": fixed counts plus at most one range, which
// becomes the sweep variable.
struct CountsSpec {
  std::vector<int> fixed{0, 0, 0, 0};
  std::optional<std::string> range_var;
  std::vector<double> range_points;
};

CountsSpec parse_counts(const std::string& text, int n_modes) {
  CountsSpec out;
  out.fixed.assign(n_modes, 0);
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || item.compare(0, 1, "m") != 0)
      throw UsageError("--counts expects mK=value or mK=a..b entries");
    const int idx = std::stoi(item.substr(1, eq - 1)) - 1;
    if (idx < 0 || idx >= n_modes)
      throw UsageError("--counts mode index out of range for this family");
    const std::string val = item.substr(eq + 1);
    const auto dots = val.find("..");
    if (dots == std::string::npos) {
      out.fixed[idx] = std::stoi(val);
      if (out.fixed[idx] < 0) throw UsageError("--counts must be nonnegative");
      continue;
    }
    if (out.range_var) throw UsageError("--counts allows only one range");
    const int lo = std::stoi(val.substr(0, dots));
    const int hi = std::stoi(val.substr(dots + 2));
    if (lo < 0 || hi < lo) throw UsageError("--counts range must be ordered");
    out.range_var = "m" + std::to_string(idx + 1);
    for (int m = lo; m <= hi; ++m) out.range_points.push_back(m);
  }
  return out;
}

struct CommonFlags {
  std::string family = "fmsv";
  double r = 0.4;
  double gamma1 = 0.5, gamma2 = 0.8, phi2 = 0.0, phi3 = 0.0, t = 1.0;
  std::string sweep_text, counts_text;
  std::string op = "none";
  std::string engine;
  double eps_tail = 1e-10;
  int max_shell = 200;
  int jobs = 0;
  int seed = 0;  // reserved; all computations are deterministic
};

FockOptions fock_options(const CommonFlags& f) {
  return {f.eps_tail, f.max_shell};
}

int family_modes(const std::string& family) {
  if (family == "tritter" || family == "crystal") return 3;
  if (family == "fmsv") return 4;
  throw UsageError("unknown --family '" + family + "'");
}

CrystalParams crystal_params(const CommonFlags& f) {
  return {f.gamma1, f.gamma2, f.t, f.phi2, f.phi3};
}

CovarianceMatrix family_cm(const CommonFlags& f) {
  if (f.family == "tritter") return tritter_cm(f.r);
  if (f.family == "crystal") return crystal_cm(crystal_params(f));
  return fmsv_cm(f.r);
}

FockState family_fock(const CommonFlags& f, const std::vector<int>& counts) {
  const auto opt = fock_options(f);
  const bool trivial =
      std::all_of(counts.begin(), counts.end(), [](int m) { return m == 0; });
  if (f.family == "crystal") {
    if (f.op == "add") return build_added_crystal(crystal_params(f), counts, opt);
    if (f.op == "subtract")
      return build_subtracted_crystal(crystal_params(f), counts, opt);
    return build_crystal_fock(crystal_params(f), opt);
  }
  if (f.family == "fmsv") {
    if (f.op == "add") return build_added_fmsv(f.r, counts, opt);
    if (f.op == "subtract") return build_subtracted_fmsv(f.r, counts, opt);
    return build_fmsv_fock(f.r, opt);
  }
  (void)trivial;
  throw UsageError("--engine fock is unavailable for the tritter family");
}

struct GgmRow {
  double param = 0.0;
  std::vector<std::pair<std::string, GgmResult>> by_engine;  // engine, result
  double tail_bound = 0.0;
};

int cmd_ggm(const CommonFlags& flags) {
  CommonFlags base = flags;
  if (base.engine.empty())
    base.engine = (base.op == "none") ? "gaussian" : "fock";
  if (base.engine == "gaussian" && base.op != "none")
    throw UsageError("--engine gaussian requires --op none");
  if (base.op != "none" && base.family == "tritter")
    throw UsageError("photon operations are not defined for the tritter");
  if (base.op != "none" && base.counts_text.empty())
    throw UsageError("--op add/subtract requires --counts");

  const int n_modes = family_modes(base.family);
  CountsSpec counts = base.counts_text.empty()
                          ? CountsSpec{std::vector<int>(n_modes, 0), {}, {}}
                          : parse_counts(base.counts_text, n_modes);

  std::string sweep_var;
  std::vector<double> points{0.0};
  if (!base.sweep_text.empty() && counts.range_var)
    throw UsageError("choose either --sweep or a --counts range, not both");
  if (!base.sweep_text.empty()) {
    const auto sw = parse_sweep(base.sweep_text);
    sweep_var = sw.variable;
    points = sw.points;
  } else if (counts.range_var) {
    sweep_var = *counts.range_var;
    points = counts.range_points;
  } else {
    sweep_var = (base.family == "crystal") ? "t" : "r";
    points = {(base.family == "crystal") ? base.t : base.r};
  }

  std::vector<GgmRow> rows(points.size());
  parallel_for(static_cast<int>(points.size()), base.jobs, [&](int i) {
    CommonFlags f = base;
    auto cts = counts.fixed;
    const double x = points[i];
    if (sweep_var == "r") f.r = x;
    else if (sweep_var == "t") f.t = x;
    else if (sweep_var.size() == 2 && sweep_var[0] == 'm')
      cts[sweep_var[1] - '1'] = static_cast<int>(std::lround(x));
    else if (sweep_var == "gamma1") f.gamma1 = x;
    else if (sweep_var == "gamma2") f.gamma2 = x;
    else throw UsageError("unknown sweep variable '" + sweep_var + "'");

    GgmRow row;
    row.param = x;
    if (f.engine == "gaussian" || f.engine == "both")
      row.by_engine.emplace_back("gaussian", ggm_gaussian(family_cm(f)));
    if (f.engine == "fock" || f.engine == "both") {
      const auto st = family_fock(f, cts);
      row.tail_bound = st.tail_bound;
      row.by_engine.emplace_back("fock", ggm_fock(st));
    }
    if (row.by_engine.empty())
      throw UsageError("unknown --engine '" + f.engine + "'");
    rows[i] = std::move(row);
  });

  std::cout << "param,ggm,argmax_partition,engine,tail_bound\n";
  double max_diff = 0.0;
  for (const auto& row : rows) {
    for (const auto& [engine, res] : row.by_engine)
      std::cout << fmt(row.param) << ',' << fmt(res.value) << ','
                << partition_label(res.argmax_partition) << ',' << engine << ','
                << fmt(engine == "fock" ? row.tail_bound : 0.0) << '\n';
    if (row.by_engine.size() == 2)
      max_diff = std::max(max_diff, std::abs(row.by_engine[0].second.value -
                                             row.by_engine[1].second.value));
  }
  if (base.engine == "both")
    std::cout << "# max_abs_diff=" << fmt(max_diff) << '\n';
  return 0;
}

int cmd_nongauss_table(const CommonFlags& flags, const std::string& rows_text) {
  std::vector<std::pair<int, int>> rows = {{2, 0}, {5, 0},  {10, 0},
                                           {2, 1}, {5, 1}, {10, 1}};
  if (!rows_text.empty()) {
    rows.clear();
    std::istringstream is(rows_text);
    std::string item;
    while (std::getline(is, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw UsageError("--rows expects m1:m2 pairs separated by commas");
      rows.emplace_back(std::stoi(item.substr(0, colon)),
                        std::stoi(item.substr(colon + 1)));
    }
  }

  const auto opt = fock_options(flags);
  const double base_ggm = ggm_fock(build_fmsv_fock(flags.r, opt)).value;
  if (base_ggm <= 0.0)
    std::cerr << "warning: baseline GGM is zero; enhancement reported as nan\n";

  struct Row {
    double d_add = 0, f_add = 0, d_sub = 0, f_sub = 0;
  };
  std::vector<Row> out(rows.size());
  parallel_for(static_cast<int>(rows.size()), flags.jobs, [&](int i) {
    const std::vector<int> counts{rows[i].first, rows[i].second, 0, 0};
    Row r;
    const bool trivial = rows[i].first == 0 && rows[i].second == 0;
    const auto added =
        trivial ? build_fmsv_fock(flags.r, opt)
                : build_added_fmsv(flags.r, counts, opt);
    const auto sub =
        trivial ? build_fmsv_fock(flags.r, opt)
                : build_subtracted_fmsv(flags.r, counts, opt);
    r.d_add = delta_ng(added);
    r.d_sub = delta_ng(sub);
    const auto enhance = [&](double g) {
      return base_ggm > 0.0 ? (g - base_ggm) / base_ggm
                            : std::numeric_limits<double>::quiet_NaN();
    };
    r.f_add = enhance(ggm_fock(added).value);
    r.f_sub = enhance(ggm_fock(sub).value);
    out[i] = r;
  });

  std::cout << "m1,m2,delta_add,f_add,delta_sub,f_sub\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::cout << rows[i].first << ',' << rows[i].second << ','
              << fmt(out[i].d_add) << ',' << fmt(out[i].f_add) << ','
              << fmt(out[i].d_sub) << ',' << fmt(out[i].f_sub) << '\n';
  return 0;
}

int cmd_freeze_check(const CommonFlags& flags, int total, int m2_fixed) {
  if (total < 0 || m2_fixed < 0) throw UsageError("counts must be nonnegative");
  const auto opt = fock_options(flags);
  std::vector<double> values(total + 1);
  parallel_for(total + 1, flags.jobs, [&](int m1) {
    const std::vector<int> counts{m1, m2_fixed, total - m1, 0};
    const auto st = flags.op == "add"
                        ? build_added_fmsv(flags.r, counts, opt)
                        : build_subtracted_fmsv(flags.r, counts, opt);
    values[m1] = ggm_fock(st).value;
  });
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double spread = *hi - *lo;
  std::cout << "m1,ggm\n";
  for (int m1 = 0; m1 <= total; ++m1)
    std::cout << m1 << ',' << fmt(values[m1]) << '\n';
  std::cout << "# spread=" << fmt(spread) << '\n';
  return spread < 1e-9 ? 0 : 1;
}

int cmd_compare_modes(const CommonFlags& flags, const std::string& pairing,
                      const std::string& op, int grid_max,
                      std::optional<int> constrained) {
  const auto opt = fock_options(flags);
  const double r = flags.r;
  auto ggm_of = [&](const std::string& kind, const std::vector<int>& counts) {
    const bool trivial =
        std::all_of(counts.begin(), counts.end(), [](int m) { return m == 0; });
    if (trivial) return ggm_fock(build_fmsv_fock(r, opt)).value;
    if (kind == "add") return ggm_fock(build_added_fmsv(r, counts, opt)).value;
    return ggm_fock(build_subtracted_fmsv(r, counts, opt)).value;
  };
  auto place = [&](int m1, int m2) {
    return pairing == "alternate" ? std::vector<int>{m1, 0, m2, 0}
                                  : std::vector<int>{m1, m2, 0, 0};
  };

  struct Cell {
    int a = 0, b = 0;
    double value = 0.0;
  };
  std::vector<Cell> cells;
  if (constrained) {
    // three-mode constrained split m1 + m2 + m3 = M (pairing "three"), or
    // two-mode split m1 + m2 = M otherwise
    const int m = *constrained;
    if (pairing == "three") {
      for (int m1 = 0; m1 <= m; ++m1)
        for (int m2 = 0; m1 + m2 <= m; ++m2) cells.push_back({m1, m2, 0.0});
    } else {
      for (int m1 = 0; m1 <= m; ++m1) cells.push_back({m1, m - m1, 0.0});
    }
  } else {
    for (int m1 = 0; m1 <= grid_max; ++m1)
      for (int m2 = 0; m2 <= grid_max; ++m2) cells.push_back({m1, m2, 0.0});
  }

  parallel_for(static_cast<int>(cells.size()), flags.jobs, [&](int i) {
    const int m1 = cells[i].a, m2 = cells[i].b;
    double v = 0.0;
    if (op == "add" || op == "subtract") {
      const auto counts = constrained && pairing == "three"
                              ? std::vector<int>{m1, m2,
                                                 *constrained - m1 - m2, 0}
                              : place(m1, m2);
      v = ggm_of(op, counts);
    } else if (op == "diff-sub-add") {
      v = ggm_of("subtract", place(m1, m2)) - ggm_of("add", place(m1, m2));
    } else if (op == "diff-alt-adj") {
      const std::string base = pairing == "subtract" ? "subtract" : "add";
      v = ggm_of(base, {m1, 0, m2, 0}) - ggm_of(base, {m1, m2, 0, 0});
    } else {
      throw UsageError("unknown --op '" + op + "' for compare-modes");
    }
    cells[i].value = v;
  });

  std::cout << "m1,m2_or_n,value\n";
  for (const auto& c : cells)
    std::cout << c.a << ',' << c.b << ',' << fmt(c.value) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GGM and non-Gaussianity calculator for pure CV states"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--family", flags.family, "tritter | crystal | fmsv");
    sub->add_option("--r", flags.r, "squeezing parameter");
    sub->add_option("--gamma1", flags.gamma1, "crystal coupling gamma1");
    sub->add_option("--gamma2", flags.gamma2, "crystal coupling gamma2");
    sub->add_option("--phi2", flags.phi2, "crystal phase phi2");
    sub->add_option("--phi3", flags.phi3, "crystal phase phi3");
    sub->add_option("--t", flags.t, "crystal evolution time");
    sub->add_option("--sweep", flags.sweep_text, "VAR=a:b:step");
    sub->add_option("--counts", flags.counts_text,
                    "photon counts, e.g. m1=2,m2=0 or m1=0..10");
    sub->add_option("--op", flags.op, "none | add | subtract");
    sub->add_option("--engine", flags.engine, "gaussian | fock | both");
    sub->add_option("--eps-tail", flags.eps_tail, "truncation tail budget");
    sub->add_option("--max-shell", flags.max_shell, "total-photon shell cap");
    sub->add_option("--jobs", flags.jobs, "worker threads (0 = hardware)");
    sub->add_option("--seed", flags.seed, "reserved; computations are deterministic");
  };

  auto* ggm_cmd = app.add_subcommand("ggm", "GGM over a parameter sweep");
  add_common(ggm_cmd);

  auto* table_cmd =
      app.add_subcommand("nongauss-table", "non-Gaussianity vs enhancement");
  add_common(table_cmd);
  std::string rows_text;
  table_cmd->add_option("--rows", rows_text, "m1:m2 pairs, comma separated");

  auto* freeze_cmd =
      app.add_subcommand("freeze-check", "GGM spread over m1 + m3 = M splits");
  add_common(freeze_cmd);
  int freeze_total = 6, freeze_m2 = 0;
  freeze_cmd->add_option("--M", freeze_total, "total photons split over modes");
  freeze_cmd->add_option("--m2", freeze_m2, "fixed count on the second mode");

  auto* compare_cmd =
      app.add_subcommand("compare-modes", "mode-placement comparisons");
  add_common(compare_cmd);
  std::string pairing = "adjacent", compare_op = "diff-sub-add";
  int grid_max = 4;
  std::optional<int> constrained;
  compare_cmd->add_option("--pairing", pairing,
                          "adjacent | alternate | three");
  compare_cmd->add_option("--compare-op", compare_op,
                          "add | subtract | diff-sub-add | diff-alt-adj");
  compare_cmd->add_option("--grid-max", grid_max, "grid bound per count");
  int constrained_m = -1;
  compare_cmd->add_option("--constrained", constrained_m,
                          "fix the total count M (desk-scale default 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ggm_cmd->parsed()) return cmd_ggm(flags);
    if (table_cmd->parsed()) return cmd_nongauss_table(flags, rows_text);
    if (freeze_cmd->parsed())
      return cmd_freeze_check(flags, freeze_total, freeze_m2);
    if (compare_cmd->parsed()) {
      if (constrained_m >= 0) constrained = constrained_m;
      if (compare_cmd->count("--constrained") &&
          constrained_m < 0)
        constrained = 8;  // desk-scale default
      return cmd_compare_modes(flags, pairing, compare_op, grid_max,
                               constrained);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
