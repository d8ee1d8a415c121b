#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "sharedas/errors.hpp"
#include "sharedas/problems.hpp"

namespace sharedas {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Layout {
  Eigen::Index d = 0;
  Eigen::Index c = 0;
};

Layout parse_header(const std::vector<std::string_view>& names) {
  Layout layout;
  std::size_t pos = 0;
  auto expect = [&](const std::string& name) {
    if (pos >= names.size() || names[pos] != name) {
      const std::string got = pos < names.size() ? std::string(names[pos]) : "<end of header>";
      throw ParseError("dataset header: expected column '" + name + "' at position " +
                       std::to_string(pos + 1) + ", found '" + got + "'");
    }
    ++pos;
  };
  auto count_prefix = [&](const std::string& prefix) {
    Eigen::Index k = 0;
    while (pos < names.size() && names[pos] == prefix + std::to_string(k + 1)) {
      ++k;
      ++pos;
    }
    return k;
  };
  layout.d = count_prefix("x_");
  layout.c = count_prefix("f_");
  if (layout.d == 0) throw ParseError("dataset header: no x_ columns");
  if (layout.c == 0) throw ParseError("dataset header: no f_ columns after x_1..x_" + std::to_string(layout.d));
  for (Eigen::Index k = 1; k <= layout.c; ++k) {
    for (Eigen::Index i = 1; i <= layout.d; ++i) {
      expect("g_" + std::to_string(k) + "_" + std::to_string(i));
    }
  }
  if (pos != names.size()) {
    throw ParseError("dataset header: unexpected extra column '" + std::string(names[pos]) + "'");
  }
  return layout;
}

double parse_value(std::string_view field, std::size_t row, std::string_view column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError("dataset row " + std::to_string(row) + ", column " + std::string(column) +
                     ": cannot parse '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError("dataset row " + std::to_string(row) + ", column " + std::string(column) +
                     ": non-finite value");
  }
  return value;
}

}  // namespace

DatasetProblem parse_dataset_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset: empty file");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const std::vector<std::string> header_names = [&] {
    std::vector<std::string> v;
    for (auto f : split_fields(line)) v.emplace_back(f);
    return v;
  }();
  std::vector<std::string_view> header_views(header_names.begin(), header_names.end());
  const Layout layout = parse_header(header_views);
  const std::size_t width = header_names.size();

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row_number;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw ParseError("dataset row " + std::to_string(row_number) + ": expected " +
                       std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) {
      values[c] = parse_value(fields[c], row_number, header_names[c]);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("dataset: no data rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  DatasetProblem data;
  data.points.resize(n, layout.d);
  data.outputs.resize(n, layout.c);
  data.gradients.assign(static_cast<std::size_t>(layout.c), Matrix(n, layout.d));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& v = rows[static_cast<std::size_t>(r)];
    std::size_t col = 0;
    for (Eigen::Index i = 0; i < layout.d; ++i) data.points(r, i) = v[col++];
    for (Eigen::Index k = 0; k < layout.c; ++k) data.outputs(r, k) = v[col++];
    for (Eigen::Index k = 0; k < layout.c; ++k) {
      for (Eigen::Index i = 0; i < layout.d; ++i) data.gradients[static_cast<std::size_t>(k)](r, i) = v[col++];
    }
  }
  return data;
}

DatasetProblem load_dataset_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("dataset: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset_csv(buffer.str());
}

std::string format_dataset_csv(const DatasetProblem& data) {
  const Eigen::Index n = data.size();
  const Eigen::Index d = data.input_dim();
  const Eigen::Index c = data.output_dim();
  if (data.outputs.rows() != n || static_cast<Eigen::Index>(data.gradients.size()) != c) {
    throw ValidationError("format_dataset_csv: inconsistent dimensions");
  }
  std::string out;
  auto sep = [&](bool& first) {
    if (!first) out += ',';
    first = false;
  };
  bool first = true;
  for (Eigen::Index i = 1; i <= d; ++i) { sep(first); out += "x_" + std::to_string(i); }
  for (Eigen::Index k = 1; k <= c; ++k) { sep(first); out += "f_" + std::to_string(k); }
  for (Eigen::Index k = 1; k <= c; ++k) {
    for (Eigen::Index i = 1; i <= d; ++i) {
      sep(first);
      out += "g_" + std::to_string(k) + "_" + std::to_string(i);
    }
  }
  out += '\n';
  char buf[64];
  auto put = [&](double v, bool& f) {
    sep(f);
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
  };
  for (Eigen::Index r = 0; r < n; ++r) {
    bool f = true;
    for (Eigen::Index i = 0; i < d; ++i) put(data.points(r, i), f);
    for (Eigen::Index k = 0; k < c; ++k) put(data.outputs(r, k), f);
    for (Eigen::Index k = 0; k < c; ++k) {
      const Matrix& g = data.gradients[static_cast<std::size_t>(k)];
      if (g.rows() != n || g.cols() != d) throw ValidationError("format_dataset_csv: gradient shape");
      for (Eigen::Index i = 0; i < d; ++i) put(g(r, i), f);
    }
    out += '\n';
  }
  return out;
}

void write_dataset_problem(const DatasetProblem& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset " + path.string());
  out << format_dataset_csv(data);
}

}  // namespace sharedas
