#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causet {

enum class ColumnKind { Numeric, Categorical, Binary };

std::string_view to_string(ColumnKind kind);
ColumnKind parse_column_kind(std::string_view text);

/// One column of a Frame. Numeric and binary columns store `numbers`;
/// categorical columns store `labels`. `missing[i]` marks an empty cell;
/// the stored value at a missing position is unspecified (0 / "").
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> numbers;
  std::vector<std::string> labels;
  std::vector<std::uint8_t> missing;

  std::size_t size() const noexcept { return missing.size(); }
  bool has_missing() const noexcept;

  static Column numeric(std::string name, std::vector<double> values);
  static Column binary(std::string name, std::vector<double> values);
  static Column categorical(std::string name, std::vector<std::string> values);

  friend bool operator==(const Column&, const Column&) = default;
};

/// Immutable columnar table. Every transformation returns a new Frame.
class Frame {
 public:
  Frame() = default;
  /// Throws DimensionMismatch on unequal lengths, InvalidArgument on duplicate
  /// names, KindError if a binary column holds values other than 0/1.
  explicit Frame(std::vector<Column> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  std::vector<std::string> names() const;

  bool has(std::string_view name) const noexcept;
  /// Throws UnknownColumn.
  const Column& column(std::string_view name) const;

  /// Values of a numeric or binary column. Throws UnknownColumn, KindError.
  std::span<const double> numbers(std::string_view name) const;

  /// Adds a column, or replaces the one with the same name in place.
  Frame with_column(Column column) const;
  Frame without_column(std::string_view name) const;
  /// Rows in the given order (indices may repeat).
  Frame select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

using Schema = std::map<std::string, ColumnKind, std::less<>>;

/// Reads an RFC-4180 CSV file with a mandatory header row. Columns named in
/// `schema` get that kind; others are inferred (all numbers -> numeric, all
/// 0/1 -> binary, anything else -> categorical). Empty fields are missing.
/// Throws IoError, ParseError, RaggedRowError, TypeConflictError.
Frame load_csv(const std::string& path, const Schema& schema = {});
Frame parse_csv(std::string_view text, const Schema& schema = {});

std::string format_csv(const Frame& frame);
void write_csv(const Frame& frame, const std::string& path);

/// Shortest decimal text that round-trips the double.
std::string format_number(double value);

/// Replaces a categorical column with binary indicators `col=<level>`, levels
/// sorted lexicographically. Missing entries get their own `col=__missing__`
/// level. Throws UnknownColumn, KindError.
Frame one_hot(const Frame& frame, std::string_view column);

struct ImputeResult {
  Frame frame;
  /// Set when every entry was missing and the column was filled with 0.
  bool all_missing = false;
};

/// Fills missing entries of a numeric or binary column with the mean of the
/// observed entries. A binary column whose mean is fractional becomes numeric.
ImputeResult impute_mean(const Frame& frame, std::string_view column);

enum class Comparator { AboveMean, BelowMean };

struct LabelRule {
  std::string source;
  std::string target;
  Comparator comparator = Comparator::AboveMean;
};

/// target = 1 where source > mean(source) (strict; BelowMean uses <), else 0.
/// Throws UnknownColumn, KindError, MissingDataError.
Frame derive_binary_label(const Frame& frame, const LabelRule& rule);

/// Seeded uniform shuffle into (train, rest) with |train| = ceil(n * fraction).
/// Both parts keep the original row order. Throws EmptyFrame, InvalidArgument.
std::pair<Frame, Frame> split(const Frame& frame, double train_fraction, std::uint64_t seed);

/// Row indices of the training part of split(); exposed for reuse.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed);

/// Values of a binary-valued column (binary kind, or numeric holding only 0/1)
/// with no missing entries. Throws UnknownColumn, KindError, MissingDataError.
std::vector<double> binary_values(const Frame& frame, std::string_view column);

/// Values of a numeric/binary column with no missing entries.
std::vector<double> complete_values(const Frame& frame, std::string_view column);

}  // namespace causet
