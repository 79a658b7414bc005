#include <fstream>
#include <string>

#include "ovm/asymptotics.hpp"
#include "ovm/csv.hpp"
#include "ovm/error.hpp"
#include "ovm/experiments.hpp"

namespace ovm {

std::vector<std::string> figure_header(int which, unsigned k) {
  switch (which) {
    case 1: return {"q", "N", "p_hat", "ci_lo", "ci_hi", "beta_bound"};
    case 2: return {"q", "N", "tau_abs", "outcome_class", "reference"};
    case 3: return {"q", "N", "c1", "c2", "edges_remaining", "n_components"};
    case 4: {
      std::vector<std::string> h = {"q", "N"};
      for (unsigned i = 1; i <= k; ++i) h.push_back("count_" + std::to_string(i));
      for (const char* name : {"c1", "c2", "c3", "outcome_class", "strong_segregation"}) h.emplace_back(name);
      return h;
    }
    default: fail(ErrorKind::BadParams, "figure must be 1, 2, 3 or 4");
  }
}

namespace {

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::SchemaMismatch, "expected a number, got '" + s + "'");
  }
}

unsigned sweep_k(const CsvTable& runs) {
  if (runs.rows.empty()) return 2;
  return static_cast<unsigned>(to_double(runs.rows.front()[runs.column("K")]));
}

}  // namespace

std::filesystem::path figure_datasets(const std::filesystem::path& sweep_dir, int which,
                                      const std::filesystem::path& out_dir) {
  if (which < 1 || which > 4) fail(ErrorKind::BadParams, "figure must be 1, 2, 3 or 4");
  const CsvTable runs = read_csv(sweep_dir / "runs.csv");
  require_header(runs, runs_header(), "runs.csv");
  const CsvTable agg = read_csv(sweep_dir / "aggregate.csv");
  require_header(agg, aggregate_header(), "aggregate.csv");

  const unsigned k = sweep_k(runs);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto path = out_dir / ("fig" + std::to_string(which) + ".csv");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << join(figure_header(which, k), ',') << '\n';

  const std::size_t c_q = runs.column("q"), c_n = runs.column("N"), c_status = runs.column("status"),
                    c_class = runs.column("outcome_class");
  switch (which) {
    case 1: {
      const std::size_t a_q = agg.column("q"), a_n = agg.column("N"), a_p = agg.column("p_segregation"),
                        a_lo = agg.column("p_segregation_lo"), a_hi = agg.column("p_segregation_hi");
      for (const auto& row : agg.rows) {
        if (row[a_p].empty()) continue;
        out << row[a_q] << ',' << row[a_n] << ',' << row[a_p] << ',' << row[a_lo] << ',' << row[a_hi] << ','
            << format_double(segregation_bound(to_double(row[a_q]))) << '\n';
      }
      break;
    }
    case 2: {
      const std::size_t c_tau = runs.column("tau_abs");
      for (const auto& row : runs.rows) {
        if (row[c_status] != "ok") continue;
        const double q = to_double(row[c_q]);
        const double n = to_double(row[c_n]);
        // No finite reference at q = 1; the field is left empty.
        const std::string reference = q < 1.0 ? format_double(n * (n - 1.0) / 2.0 / (1.0 - q)) : std::string{};
        out << row[c_q] << ',' << row[c_n] << ',' << row[c_tau] << ',' << row[c_class] << ',' << reference << '\n';
      }
      break;
    }
    case 3: {
      const std::size_t c1 = runs.column("c1"), c2 = runs.column("c2"), c_edges = runs.column("edges_remaining"),
                        c_comp = runs.column("n_components");
      for (const auto& row : runs.rows) {
        if (row[c_status] != "ok" || row[c_class] != "Segregation") continue;
        out << row[c_q] << ',' << row[c_n] << ',' << row[c1] << ',' << row[c2] << ',' << row[c_edges] << ','
            << row[c_comp] << '\n';
      }
      break;
    }
    case 4: {
      const std::size_t c_counts = runs.column("final_counts"), c1 = runs.column("c1"), c2 = runs.column("c2"),
                        c3 = runs.column("c3"), c_strong = runs.column("strong_segregation");
      for (const auto& row : runs.rows) {
        if (row[c_status] != "ok") continue;
        const auto counts = parse_list(row[c_counts]);
        if (counts.size() != k) fail(ErrorKind::SchemaMismatch, "final_counts length differs from K");
        out << row[c_q] << ',' << row[c_n];
        for (std::size_t c : counts) out << ',' << c;
        out << ',' << row[c1] << ',' << row[c2] << ',' << row[c3] << ',' << row[c_class] << ',' << row[c_strong]
            << '\n';
      }
      break;
    }
    default: break;
  }
  if (!out) fail(ErrorKind::IoError, "write failed for " + path.string());
  return path;
}

}  // namespace ovm
