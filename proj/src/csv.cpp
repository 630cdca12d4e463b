#include "gefet/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace gefet {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("failed to format a number");
  return {buf, ptr};
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& path, long line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  while (ptr < e && (*ptr == ' ' || *ptr == '\t')) ++ptr;
  if (ec != std::errc() || ptr != e) {
    throw ParseError(path + ":" + std::to_string(line) +
                     ": cannot parse number '" + s + "'");
  }
  return v;
}

struct RawCsv {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  bool has_y = false;
};

RawCsv read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw EmptyDataset(path + " is empty");

  std::vector<std::string> header = split_line(line);
  const std::size_t cols = header.size();
  bool has_y = header.back() == "y";
  const std::size_t d = has_y ? cols - 1 : cols;
  if (d == 0) throw ParseError(path + ":1: no input columns in header");
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "x" + std::to_string(j + 1)) {
      throw ParseError(path + ":1: expected column 'x" + std::to_string(j + 1) +
                       "', found '" + header[j] + "'");
    }
  }

  std::vector<double> values;
  long line_no = 1;
  long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != cols) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " fields, found " +
                       std::to_string(fields.size()));
    }
    for (const std::string& f : fields) {
      values.push_back(parse_double(f, path, line_no));
    }
    ++rows;
  }
  if (rows == 0) throw EmptyDataset(path + " has a header but no data rows");

  RawCsv out;
  out.has_y = has_y;
  out.x.resize(rows, static_cast<Eigen::Index>(d));
  out.y = Eigen::VectorXd::Zero(rows);
  for (long i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out.x(i, static_cast<Eigen::Index>(j)) =
          values[static_cast<std::size_t>(i) * cols + j];
    }
    if (has_y) out.y(i) = values[static_cast<std::size_t>(i) * cols + d];
  }
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, bool normalize, bool center_y) {
  RawCsv raw = read_rows(path);
  if (!raw.has_y) {
    throw ParseError(path + ":1: expected a trailing 'y' column");
  }
  Dataset data{std::move(raw.x), std::move(raw.y), std::nullopt};
  check_dataset(data);
  if (normalize) normalize_inputs(data, center_y);
  return data;
}

std::pair<Dataset, bool> load_csv_maybe_targets(const std::string& path) {
  RawCsv raw = read_rows(path);
  Dataset data{std::move(raw.x), std::move(raw.y), std::nullopt};
  check_dataset(data);
  return {std::move(data), raw.has_y};
}

void save_csv(const std::string& path, const Eigen::MatrixXd& x,
              const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw DimensionMismatch("input rows and target length differ");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (Eigen::Index j = 0; j < x.cols(); ++j) out << "x" << (j + 1) << ",";
  out << "y\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out << format_double(x(i, j)) << ",";
    }
    out << format_double(y(i)) << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void save_predictions_csv(const std::string& path,
                          const Eigen::VectorXd& pred) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "yhat\n";
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    out << format_double(pred(i)) << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void save_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "step,loss,reg\n";
  for (const TraceRow& row : trace) {
    out << row.step << "," << format_double(row.loss) << ","
        << format_double(row.reg) << "\n";
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace gefet
