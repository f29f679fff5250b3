#include "hdreg/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hdreg/preprocess.hpp"

namespace hdreg {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("non-numeric cell '" + cell + "'", row, col);
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() < 2) throw InputError(path.string() + ": need a header and data rows");

  const std::vector<std::string> header = split_line(lines[0]);
  const std::size_t width = header.size();
  if (width < 2) throw ParseError("header needs an id column and data columns", 1, 1);
  const std::size_t p = width - 1;

  std::size_t first_data = 1;
  Dataset d;
  std::vector<std::vector<double>> rows;
  std::unordered_set<std::string> seen;

  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> cells = split_line(lines[r]);
    if (cells.size() != width)
      throw ParseError("ragged row: " + std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(width), r + 1, cells.size());
    if (r == first_data && cells[0] == "domain") {
      Eigen::VectorXd grid(p);
      for (std::size_t j = 1; j < width; ++j) grid[j - 1] = parse_cell(cells[j], r + 1, j + 1);
      d.domain = grid;
      ++first_data;
      continue;
    }
    if (!seen.insert(cells[0]).second)
      throw ParseError("duplicate sample id '" + cells[0] + "'", r + 1, 1);
    d.sample_ids.push_back(cells[0]);
    std::vector<double> row(p);
    for (std::size_t j = 1; j < width; ++j) row[j - 1] = parse_cell(cells[j], r + 1, j + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path.string() + ": no data rows");

  d.x.resize(rows.size(), p);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < p; ++j) d.x(i, j) = rows[i][j];
  validate(d);
  return d;
}

void attach_response_csv(Dataset& d, const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() < 2) throw InputError(path.string() + ": need a header and data rows");
  std::unordered_map<std::string, double> values;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> cells = split_line(lines[r]);
    if (cells.size() != 2)
      throw ParseError("response rows need exactly id,value", r + 1, cells.size());
    if (!values.emplace(cells[0], parse_cell(cells[1], r + 1, 2)).second)
      throw ParseError("duplicate sample id '" + cells[0] + "'", r + 1, 1);
  }
  if (d.sample_ids.empty())
    throw InputError("attach_response_csv: dataset has no sample ids to match");
  d.y.resize(d.n());
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    auto it = values.find(d.sample_ids[i]);
    if (it == values.end())
      throw InputError("response file " + path.string() + " is missing sample id '" +
                       d.sample_ids[i] + "'");
    d.y[i] = it->second;
  }
}

void save_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "id";
  for (Eigen::Index j = 0; j < d.p(); ++j) out << ",c" << j;
  out << "\n";
  if (d.domain) {
    out << "domain";
    for (Eigen::Index j = 0; j < d.p(); ++j) out << "," << format_double((*d.domain)[j]);
    out << "\n";
  }
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    out << (d.sample_ids.empty() ? "s" + std::to_string(i) : d.sample_ids[i]);
    for (Eigen::Index j = 0; j < d.p(); ++j) out << "," << format_double(d.x(i, j));
    out << "\n";
  }
}

void save_response_csv(const Dataset& d, const std::filesystem::path& path,
                       const std::string& value_name) {
  if (d.y.size() != d.n()) throw InputError("save_response_csv: dataset has no response");
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "id," << value_name << "\n";
  for (Eigen::Index i = 0; i < d.n(); ++i)
    out << (d.sample_ids.empty() ? "s" + std::to_string(i) : d.sample_ids[i]) << ","
        << format_double(d.y[i]) << "\n";
}

}  // namespace hdreg
