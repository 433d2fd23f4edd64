#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "tada/errors.hpp"
#include "tada/io/csv.hpp"
#include "tada/survival/dataset.hpp"

namespace tada {

enum class MissingPolicy { Reject, DropRow };

std::string_view to_string(MissingPolicy policy);
MissingPolicy parse_missing_policy(std::string_view text);

struct IpdTableSpec {
  std::string id_column;  // empty: ids are the data line numbers
  std::string time_column = "time";
  std::string event_column = "event";
  std::string treatment_column = "treatment";
  std::vector<CovariateSpec> covariates;
  MissingPolicy missing = MissingPolicy::Reject;
};

// Bad cell in an IPD table; line is the 1-based line in the file.
class IpdFormatError : public ValidationError {
 public:
  IpdFormatError(const std::string& what, std::size_t line, std::string column)
      : ValidationError(what), line_(line), column_(std::move(column)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

struct IpdLoad {
  SurvivalDataset dataset;
  std::vector<std::string> dropped;  // one message per dropped row (DropRow policy)
};

/// Maps table columns onto a SurvivalDataset. Empty or "NA" cells and cells
/// that violate the record invariants (time > 0, 0/1 flags, binary
/// covariates in {0,1}, numeric text) reject the file under Reject and drop
/// the row under DropRow. Missing mapped columns always throw.
IpdLoad parse_ipd(const CsvTable& table, const IpdTableSpec& spec);
IpdLoad read_ipd(const std::filesystem::path& path, const IpdTableSpec& spec);

// Columns id, time, event, treatment, covariates...; reals printed with 17 significant digits.
std::string render_ipd(const SurvivalDataset& data);
void write_ipd(const SurvivalDataset& data, const std::filesystem::path& path);

// The spec that reads back what write_ipd wrote.
IpdTableSpec ipd_spec_for(const SurvivalDataset& data);

}  // namespace tada
