#include "jointnorm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace jointnorm {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw DataError(where + ": non-numeric value '" + text + "'");
  if (!std::isfinite(value))
    throw DataError(where + ": non-finite value '" + text + "'");
  return value;
}

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line);
}

// Reads a two-column `id<TAB>value` table into a map; the header is skipped.
std::unordered_map<std::string, double>
read_keyed_column(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  std::unordered_map<std::string, double> values;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line_no == 1 || line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2)
      throw DataError(location(path, line_no) + ": malformed row, expected 2 columns");
    const double v = parse_number(fields[1], location(path, line_no));
    if (!values.emplace(fields[0], v).second)
      throw DataError(location(path, line_no) + ": duplicate id '" + fields[0] + "'");
  }
  return values;
}

} // namespace

void CountMatrix::validate() const {
  const Index m = counts.rows();
  const Index n = counts.cols();
  if (m < 2 || n < 2)
    throw DataError("count matrix needs at least 2 genes and 2 samples");
  if (static_cast<Index>(gene_ids.size()) != m ||
      static_cast<Index>(sample_ids.size()) != n)
    throw DataError("identifier count does not match matrix shape");
  if ((counts.array() < 0.0).any()) throw DataError("negative count");
  if (library_sizes.size() != n || !(library_sizes.array() > 0.0).all())
    throw DataError("library sizes must be positive, one per sample");
  if (gene_lengths) {
    if (gene_lengths->size() != m || !(gene_lengths->array() > 0.0).all())
      throw DataError("gene lengths must be positive, one per gene");
  }
}

CountMatrix load_counts(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  const auto header = split_tabs(strip_cr(line));
  if (header.size() < 3)
    throw DataError(path.string() + ": header needs gene_id and at least 2 samples");

  CountMatrix result;
  result.sample_ids.assign(header.begin() + 1, header.end());
  const std::size_t n = result.sample_ids.size();

  std::vector<double> flat;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const auto where = location(path, line_no);
    if (fields.size() != n + 1)
      throw DataError(where + ": malformed row, expected " +
                      std::to_string(n + 1) + " columns, got " +
                      std::to_string(fields.size()));
    if (!seen.insert(fields[0]).second)
      throw DataError(where + ": duplicate gene id '" + fields[0] + "'");
    result.gene_ids.push_back(fields[0]);
    for (std::size_t j = 1; j <= n; ++j) {
      const double c = parse_number(fields[j], where);
      if (c < 0.0) throw DataError(where + ": negative count");
      if (c != std::floor(c)) throw DataError(where + ": non-integer count");
      flat.push_back(c);
    }
  }

  const auto m = static_cast<Index>(result.gene_ids.size());
  result.counts = Eigen::Map<RowMatrix>(flat.data(), m, static_cast<Index>(n));
  result.library_sizes = result.counts.colwise().sum().transpose();
  result.validate();
  return result;
}

void attach_gene_lengths(CountMatrix& counts, const std::filesystem::path& path) {
  const auto table = read_keyed_column(path);
  Vector lengths(counts.genes());
  for (Index i = 0; i < counts.genes(); ++i) {
    const auto it = table.find(counts.gene_ids[i]);
    if (it == table.end())
      throw DataError(path.string() + ": missing length for gene '" +
                      counts.gene_ids[i] + "'");
    lengths[i] = it->second;
  }
  counts.gene_lengths = std::move(lengths);
  counts.validate();
}

void attach_library_sizes(CountMatrix& counts,
                          const std::filesystem::path& path) {
  const auto table = read_keyed_column(path);
  for (Index j = 0; j < counts.samples(); ++j) {
    const auto it = table.find(counts.sample_ids[j]);
    if (it == table.end())
      throw DataError(path.string() + ": missing library size for sample '" +
                      counts.sample_ids[j] + "'");
    counts.library_sizes[j] = it->second;
  }
  counts.validate();
}

CovariateTable load_covariates(const std::filesystem::path& path,
                               const std::vector<std::string>& sample_ids) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  const auto header = split_tabs(strip_cr(line));
  if (header.size() < 2)
    throw DataError(path.string() + ": header needs sample_id and a covariate");

  CovariateTable table;
  table.names.assign(header.begin() + 1, header.end());
  const auto p = static_cast<Index>(table.names.size());

  std::unordered_map<std::string, Index> row_of;
  for (std::size_t j = 0; j < sample_ids.size(); ++j)
    row_of.emplace(sample_ids[j], static_cast<Index>(j));

  table.values = RowMatrix::Constant(static_cast<Index>(sample_ids.size()), p,
                                     std::nan(""));
  std::vector<bool> filled(sample_ids.size(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const auto where = location(path, line_no);
    if (static_cast<Index>(fields.size()) != p + 1)
      throw DataError(where + ": malformed row, expected " +
                      std::to_string(p + 1) + " columns");
    const auto it = row_of.find(fields[0]);
    if (it == row_of.end())
      throw DataError(where + ": unknown sample '" + fields[0] + "'");
    if (filled[it->second])
      throw DataError(where + ": duplicate sample '" + fields[0] + "'");
    filled[it->second] = true;
    for (Index k = 0; k < p; ++k)
      table.values(it->second, k) = parse_number(fields[k + 1], where);
  }
  for (std::size_t j = 0; j < filled.size(); ++j)
    if (!filled[j])
      throw DataError(path.string() + ": no covariates for sample '" +
                      sample_ids[j] + "'");
  return table;
}

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

void write_counts(const std::filesystem::path& path, const CountMatrix& counts) {
  auto out = open_output(path);
  out << "gene_id";
  for (const auto& s : counts.sample_ids) out << '\t' << s;
  out << '\n';
  for (Index i = 0; i < counts.genes(); ++i) {
    out << counts.gene_ids[i];
    for (Index j = 0; j < counts.samples(); ++j)
      out << '\t' << format_double(counts.counts(i, j));
    out << '\n';
  }
}

void write_gene_lengths(const std::filesystem::path& path,
                        const CountMatrix& counts) {
  if (!counts.gene_lengths) throw DataError("no gene lengths to write");
  auto out = open_output(path);
  out << "gene_id\tlength\n";
  for (Index i = 0; i < counts.genes(); ++i)
    out << counts.gene_ids[i] << '\t' << format_double((*counts.gene_lengths)[i])
        << '\n';
}

void write_covariates(const std::filesystem::path& path,
                      const std::vector<std::string>& sample_ids,
                      const CovariateTable& table) {
  auto out = open_output(path);
  out << "sample_id";
  for (const auto& name : table.names) out << '\t' << name;
  out << '\n';
  for (Index j = 0; j < table.values.rows(); ++j) {
    out << sample_ids[j];
    for (Index k = 0; k < table.values.cols(); ++k)
      out << '\t' << format_double(table.values(j, k));
    out << '\n';
  }
}

} // namespace jointnorm
