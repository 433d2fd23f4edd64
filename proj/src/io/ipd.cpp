#include "tada/io/ipd.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <unordered_map>

namespace tada {

std::string_view to_string(MissingPolicy policy) { return policy == MissingPolicy::Reject ? "reject" : "drop-row"; }

MissingPolicy parse_missing_policy(std::string_view text) {
  if (text == "reject") return MissingPolicy::Reject;
  if (text == "drop-row") return MissingPolicy::DropRow;
  throw ValidationError("unknown missing-value policy '" + std::string(text) + "' (expected reject|drop-row)");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view s) { return s.empty() || s == "NA"; }

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct RowProblem {
  std::string column;
  std::string message;
};

}  // namespace

IpdLoad parse_ipd(const CsvTable& table, const IpdTableSpec& spec) {
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string name(trim(table.header[c]));
    if (!column.emplace(name, c).second) throw ValidationError("duplicate column '" + name + "'");
  }
  auto locate = [&](const std::string& name, const char* role) {
    const auto it = column.find(name);
    if (it == column.end()) throw IpdFormatError(std::string(role) + " column '" + name + "' not found", 1, name);
    return it->second;
  };
  std::vector<std::string> mapped{spec.time_column, spec.event_column, spec.treatment_column};
  if (!spec.id_column.empty()) mapped.push_back(spec.id_column);
  for (const auto& cov : spec.covariates) mapped.push_back(cov.name);
  for (std::size_t a = 0; a < mapped.size(); ++a)
    for (std::size_t b = a + 1; b < mapped.size(); ++b)
      if (mapped[a] == mapped[b]) throw ValidationError("column '" + mapped[a] + "' is mapped twice");

  const std::size_t time_col = locate(spec.time_column, "time");
  const std::size_t event_col = locate(spec.event_column, "event");
  const std::size_t trt_col = locate(spec.treatment_column, "treatment");
  const std::optional<std::size_t> id_col =
      spec.id_column.empty() ? std::nullopt : std::optional<std::size_t>(locate(spec.id_column, "id"));
  std::vector<std::size_t> cov_cols;
  for (const auto& cov : spec.covariates) cov_cols.push_back(locate(cov.name, "covariate"));

  std::vector<SubjectRecord> records;
  std::vector<std::string> dropped;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.lines[r];
    std::optional<RowProblem> problem;

    auto number = [&](std::size_t col, const std::string& name) -> double {
      if (problem) return 0.0;
      const auto cell = trim(row[col]);
      if (is_missing(cell)) {
        problem = RowProblem{name, "missing value"};
        return 0.0;
      }
      const auto v = parse_number(cell);
      if (!v) {
        problem = RowProblem{name, "malformed number '" + std::string(cell) + "'"};
        return 0.0;
      }
      return *v;
    };
    auto flag = [&](std::size_t col, const std::string& name) {
      const double v = number(col, name);
      if (!problem && v != 0.0 && v != 1.0) problem = RowProblem{name, "expected 0 or 1, found " + format_real(v)};
      return v == 1.0;
    };

    SubjectRecord rec;
    rec.id = id_col ? std::string(trim(row[*id_col])) : std::to_string(line);
    if (id_col && rec.id.empty()) problem = RowProblem{spec.id_column, "missing value"};
    rec.observed_time = number(time_col, spec.time_column);
    if (!problem && !(rec.observed_time > 0.0))
      problem = RowProblem{spec.time_column, "time must be positive, found " + format_real(rec.observed_time)};
    rec.event = flag(event_col, spec.event_column);
    rec.treatment = flag(trt_col, spec.treatment_column);
    for (std::size_t k = 0; k < spec.covariates.size(); ++k) {
      const auto& cov = spec.covariates[k];
      rec.covariates.push_back(cov.kind == CovariateKind::Binary ? (flag(cov_cols[k], cov.name) ? 1.0 : 0.0)
                                                                 : number(cov_cols[k], cov.name));
    }

    if (problem) {
      const std::string message =
          "line " + std::to_string(line) + ", column '" + problem->column + "': " + problem->message;
      if (spec.missing == MissingPolicy::Reject) throw IpdFormatError(message, line, problem->column);
      dropped.push_back(message);
      continue;
    }
    records.push_back(std::move(rec));
  }
  return {SurvivalDataset(spec.covariates, std::move(records)), std::move(dropped)};
}

IpdLoad read_ipd(const std::filesystem::path& path, const IpdTableSpec& spec) {
  const CsvTable table = read_csv(path);
  try {
    return parse_ipd(table, spec);
  } catch (const IpdFormatError& e) {
    throw IpdFormatError(path.string() + ": " + e.what(), e.line(), e.column());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string render_ipd(const SurvivalDataset& data) {
  std::string out = "id,time,event,treatment";
  for (const auto& c : data.schema()) out += "," + csv_field(c.name);
  out += "\n";
  char buf[40];
  for (const auto& r : data.records()) {
    out += csv_field(r.id);
    std::snprintf(buf, sizeof buf, ",%.17g,%d,%d", r.observed_time, r.event ? 1 : 0, r.treatment ? 1 : 0);
    out += buf;
    for (double x : r.covariates) {
      std::snprintf(buf, sizeof buf, ",%.17g", x);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void write_ipd(const SurvivalDataset& data, const std::filesystem::path& path) { write_text(path, render_ipd(data)); }

IpdTableSpec ipd_spec_for(const SurvivalDataset& data) {
  IpdTableSpec spec;
  spec.id_column = "id";
  spec.covariates = data.schema();
  return spec;
}

}  // namespace tada
