#include "pqe/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pqe {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
    size_t lead = 0;
    while (lead < c.size() && c[lead] == ' ') ++lead;
    c.erase(0, lead);
  }
  return cells;
}

}  // namespace

Relation ingest_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::vector<std::string> header = split_line(line);

  std::vector<int> wanted;  // header positions to keep
  std::vector<std::string> names;
  if (opts.columns.empty()) {
    for (size_t j = 0; j < header.size(); ++j) {
      wanted.push_back(static_cast<int>(j));
      names.push_back(header[j]);
    }
  } else {
    for (const std::string& want : opts.columns) {
      int at = -1;
      for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == want) at = static_cast<int>(j);
      if (at < 0) throw std::runtime_error(path + ": column not in header: " + want);
      wanted.push_back(at);
      names.push_back(want);
    }
  }

  std::vector<std::vector<double>> cols(wanted.size());
  int64_t row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    for (size_t w = 0; w < wanted.size(); ++w) {
      const std::string& cell = cells[wanted[w]];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw std::runtime_error(path + ": row " + std::to_string(row) + ", column '" +
                                 names[w] + "': not numeric: '" + cell + "'");
      cols[w].push_back(v);
    }
  }

  Relation rel;
  for (size_t w = 0; w < wanted.size(); ++w) rel.add_column(names[w], std::move(cols[w]));
  return rel;
}

void save_relation(const Relation& rel, const std::string& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json meta;
  meta["n"] = rel.n_tuples();
  meta["attrs"] = rel.attr_names();
  {
    std::ofstream out(dir + "/relation.json");
    out << meta.dump(2) << "\n";
  }
  std::ofstream out(dir + "/values.bin", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + dir + "/values.bin");
  for (int j = 0; j < rel.n_attrs(); ++j) {
    const auto col = rel.column(j);
    out.write(reinterpret_cast<const char*>(col.data()),
              static_cast<std::streamsize>(col.size() * sizeof(double)));
  }
}

Relation load_relation(const std::string& dir) {
  nlohmann::json meta;
  {
    std::ifstream in(dir + "/relation.json");
    if (!in) throw std::runtime_error("cannot read " + dir + "/relation.json");
    in >> meta;
  }
  const int64_t n = meta.at("n").get<int64_t>();
  const auto names = meta.at("attrs").get<std::vector<std::string>>();
  std::ifstream in(dir + "/values.bin", std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + dir + "/values.bin");
  Relation rel;
  for (const std::string& name : names) {
    std::vector<double> col(n);
    in.read(reinterpret_cast<char*>(col.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error(dir + "/values.bin is truncated");
    rel.add_column(name, std::move(col));
  }
  return rel;
}

}  // namespace pqe
