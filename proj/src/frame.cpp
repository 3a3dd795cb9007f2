#include "causet/frame.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "causet/errors.hpp"
#include "causet/graph.hpp"
#include "causet/rng.hpp"

namespace causet {

namespace {

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool is_zero_one(double v) { return v == 0.0 || v == 1.0; }

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable tokenize(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw ParseError("line " + std::to_string(line) + ": stray quote inside unquoted field");
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw ParseError("CSV has no header row");
  RawTable table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw RaggedRowError("data row " + std::to_string(r + 1) + " has " +
                           std::to_string(table.rows[r].size()) + " fields, header has " +
                           std::to_string(table.header.size()));
    }
  }
  return table;
}

bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

std::string quote(std::string_view s) {
  if (!needs_quotes(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Binary: return "binary";
  }
  return "numeric";
}

ColumnKind parse_column_kind(std::string_view text) {
  if (text == "numeric") return ColumnKind::Numeric;
  if (text == "categorical") return ColumnKind::Categorical;
  if (text == "binary") return ColumnKind::Binary;
  throw InvalidArgument("unknown column kind '" + std::string(text) + "'");
}

bool Column::has_missing() const noexcept {
  return std::any_of(missing.begin(), missing.end(), [](auto m) { return m != 0; });
}

Column Column::numeric(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Numeric;
  c.missing.assign(values.size(), 0);
  c.numbers = std::move(values);
  return c;
}

Column Column::binary(std::string name, std::vector<double> values) {
  Column c = numeric(std::move(name), std::move(values));
  c.kind = ColumnKind::Binary;
  return c;
}

Column Column::categorical(std::string name, std::vector<std::string> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Categorical;
  c.missing.assign(values.size(), 0);
  c.labels = std::move(values);
  return c;
}

Frame::Frame(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& c = columns_[i];
    if (!seen.insert(c.name).second) throw InvalidArgument("duplicate column '" + c.name + "'");
    if (i == 0) rows_ = c.size();
    if (c.size() != rows_) {
      throw DimensionMismatch("column '" + c.name + "' has " + std::to_string(c.size()) +
                              " rows, expected " + std::to_string(rows_));
    }
    const auto payload = c.kind == ColumnKind::Categorical ? c.labels.size() : c.numbers.size();
    if (payload != c.size()) throw DimensionMismatch("column '" + c.name + "' is malformed");
    if (c.kind == ColumnKind::Binary) {
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!c.missing[r] && !is_zero_one(c.numbers[r])) {
          throw KindError("binary column '" + c.name + "' holds a value other than 0/1");
        }
      }
    }
  }
}

std::vector<std::string> Frame::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

bool Frame::has(std::string_view name) const noexcept {
  return std::any_of(columns_.begin(), columns_.end(), [&](const auto& c) { return c.name == name; });
}

const Column& Frame::column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw UnknownColumn("unknown column '" + std::string(name) + "'");
}

std::span<const double> Frame::numbers(std::string_view name) const {
  const auto& c = column(name);
  if (c.kind == ColumnKind::Categorical) {
    throw KindError("column '" + c.name + "' is categorical");
  }
  return c.numbers;
}

Frame Frame::with_column(Column column) const {
  auto cols = columns_;
  auto it = std::find_if(cols.begin(), cols.end(), [&](const auto& c) { return c.name == column.name; });
  if (it != cols.end()) *it = std::move(column);
  else cols.push_back(std::move(column));
  return Frame(std::move(cols));
}

Frame Frame::without_column(std::string_view name) const {
  column(name);
  auto cols = columns_;
  std::erase_if(cols, [&](const auto& c) { return c.name == name; });
  return Frame(std::move(cols));
}

Frame Frame::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    Column out;
    out.name = c.name;
    out.kind = c.kind;
    out.missing.reserve(rows.size());
    for (auto r : rows) {
      if (r >= rows_) throw InvalidArgument("row index out of range");
      out.missing.push_back(c.missing[r]);
      if (c.kind == ColumnKind::Categorical) out.labels.push_back(c.labels[r]);
      else out.numbers.push_back(c.numbers[r]);
    }
    cols.push_back(std::move(out));
  }
  return Frame(std::move(cols));
}

Frame parse_csv(std::string_view text, const Schema& schema) {
  auto table = tokenize(text);
  const auto n = table.rows.size();
  std::vector<Column> cols;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    Column c;
    c.name = table.header[j];
    c.missing.assign(n, 0);

    std::vector<std::optional<double>> parsed(n);
    bool all_numeric = true;
    bool all_zero_one = true;
    for (std::size_t r = 0; r < n; ++r) {
      const auto& cell = table.rows[r][j];
      if (cell.empty()) {
        c.missing[r] = 1;
        continue;
      }
      parsed[r] = parse_number(cell);
      if (!parsed[r]) all_numeric = false;
      else if (!is_zero_one(*parsed[r])) all_zero_one = false;
    }

    ColumnKind kind;
    if (auto it = schema.find(c.name); it != schema.end()) {
      kind = it->second;
      if (kind != ColumnKind::Categorical && !all_numeric) {
        throw TypeConflictError("column '" + c.name + "' declared " +
                                std::string(to_string(kind)) + " but holds non-numeric text");
      }
      if (kind == ColumnKind::Binary && !all_zero_one) {
        throw TypeConflictError("column '" + c.name + "' declared binary but holds values other than 0/1");
      }
    } else {
      const bool any_value = std::any_of(c.missing.begin(), c.missing.end(), [](auto m) { return !m; });
      if (!all_numeric) kind = ColumnKind::Categorical;
      else if (all_zero_one && any_value) kind = ColumnKind::Binary;
      else kind = ColumnKind::Numeric;
    }
    c.kind = kind;
    if (kind == ColumnKind::Categorical) {
      c.labels.reserve(n);
      for (std::size_t r = 0; r < n; ++r) c.labels.push_back(table.rows[r][j]);
    } else {
      c.numbers.reserve(n);
      for (std::size_t r = 0; r < n; ++r) c.numbers.push_back(parsed[r].value_or(0.0));
    }
    cols.push_back(std::move(c));
  }
  for (const auto& [name, kind] : schema) {
    if (std::none_of(cols.begin(), cols.end(), [&](const auto& c) { return c.name == name; })) {
      throw UnknownColumn("schema names column '" + name + "' absent from the header");
    }
  }
  try {
    return Frame(std::move(cols));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

Frame load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return parse_csv(buffer.str(), schema);
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_csv(const Frame& frame) {
  std::string out;
  const auto& cols = frame.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (j) out += ',';
    out += quote(cols[j].name);
  }
  out += '\n';
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out += ',';
      const auto& c = cols[j];
      if (c.missing[r]) continue;
      if (c.kind == ColumnKind::Categorical) {
        // An empty label would read back as missing; quote it explicitly.
        out += c.labels[r].empty() ? std::string("\"\"") : quote(c.labels[r]);
      } else {
        out += format_number(c.numbers[r]);
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Frame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << format_csv(frame);
  if (!out) throw IoError("write failure on '" + path + "'");
}

Frame one_hot(const Frame& frame, std::string_view column) {
  const auto& src = frame.column(column);
  if (src.kind != ColumnKind::Categorical) {
    throw KindError("one_hot: column '" + src.name + "' is not categorical");
  }
  constexpr std::string_view kMissingLevel = "__missing__";
  std::set<std::string> levels;
  for (std::size_t r = 0; r < src.size(); ++r) {
    levels.insert(src.missing[r] ? std::string(kMissingLevel) : src.labels[r]);
  }

  std::vector<Column> cols;
  for (const auto& c : frame.columns()) {
    if (c.name != src.name) {
      cols.push_back(c);
      continue;
    }
    for (const auto& level : levels) {
      std::vector<double> indicator(src.size(), 0.0);
      for (std::size_t r = 0; r < src.size(); ++r) {
        const std::string_view value = src.missing[r] ? kMissingLevel : std::string_view(src.labels[r]);
        if (value == level) indicator[r] = 1.0;
      }
      cols.push_back(Column::binary(src.name + "=" + level, std::move(indicator)));
    }
  }
  return Frame(std::move(cols));
}

ImputeResult impute_mean(const Frame& frame, std::string_view column) {
  const auto& src = frame.column(column);
  if (src.kind == ColumnKind::Categorical) {
    throw KindError("impute_mean: column '" + src.name + "' is categorical");
  }
  if (!src.has_missing()) return {frame, false};

  double sum = 0.0;
  std::size_t observed = 0;
  for (std::size_t r = 0; r < src.size(); ++r) {
    if (!src.missing[r]) {
      sum += src.numbers[r];
      ++observed;
    }
  }
  const bool all_missing = observed == 0;
  const double fill = all_missing ? 0.0 : sum / static_cast<double>(observed);

  Column out = src;
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (out.missing[r]) {
      out.numbers[r] = fill;
      out.missing[r] = 0;
    }
  }
  if (out.kind == ColumnKind::Binary && !is_zero_one(fill)) out.kind = ColumnKind::Numeric;
  return {frame.with_column(std::move(out)), all_missing};
}

std::vector<double> complete_values(const Frame& frame, std::string_view column) {
  const auto& c = frame.column(column);
  if (c.kind == ColumnKind::Categorical) {
    throw KindError("column '" + c.name + "' is categorical");
  }
  if (c.has_missing()) throw MissingDataError("column '" + c.name + "' has missing values");
  return c.numbers;
}

std::vector<double> binary_values(const Frame& frame, std::string_view column) {
  auto values = complete_values(frame, column);
  if (!std::all_of(values.begin(), values.end(), is_zero_one)) {
    throw KindError("column '" + std::string(column) + "' is not binary");
  }
  return values;
}

Frame derive_binary_label(const Frame& frame, const LabelRule& rule) {
  const auto values = complete_values(frame, rule.source);
  if (!is_identifier(rule.target)) {
    // Graph node names must match columns, so targets follow the same syntax.
    throw InvalidArgument("label target '" + rule.target + "' is not an identifier");
  }
  double mean = 0.0;
  if (!values.empty()) {
    mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  std::vector<double> label(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    const bool hit = rule.comparator == Comparator::AboveMean ? values[r] > mean : values[r] < mean;
    label[r] = hit ? 1.0 : 0.0;
  }
  return frame.with_column(Column::binary(rule.target, std::move(label)));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie strictly between 0 and 1");
  }
  if (n == 0) throw EmptyFrame("cannot split an empty frame");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  const auto n_train = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_fraction - 1e-9)));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(rest.begin(), rest.end());
  return {std::move(train), std::move(rest)};
}

std::pair<Frame, Frame> split(const Frame& frame, double train_fraction, std::uint64_t seed) {
  auto [train, rest] = split_indices(frame.rows(), train_fraction, seed);
  return {frame.select_rows(train), frame.select_rows(rest)};
}

}  // namespace causet
