#include "pqe/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pqe {

namespace {

// Group record byte layout (little-endian):
//   int32 id, int32 parent,
//   k x { double lo, double hi },
//   k x double representative,
//   int64 member_count, int64 member_offset, int64 member_length
struct RecordWriter {
  std::ofstream out;
  explicit RecordWriter(const std::string& path) : out(path, std::ios::binary) {
    if (!out) throw std::runtime_error("cannot write " + path);
  }
  template <typename T>
  void put(const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
};

struct RecordReader {
  std::ifstream in;
  explicit RecordReader(const std::string& path) : in(path, std::ios::binary) {
    if (!in) throw std::runtime_error("cannot read " + path);
  }
  template <typename T>
  void get(T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("truncated file");
  }
};

void write_doubles(const std::string& path, const std::vector<std::span<const double>>& cols) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (auto c : cols)
    out.write(reinterpret_cast<const char*>(c.data()),
              static_cast<std::streamsize>(c.size() * sizeof(double)));
}

}  // namespace

int hierarchy_depth(int64_t n, int64_t alpha, double df) {
  int levels = 0;
  double cap = static_cast<double>(alpha);
  while (cap < static_cast<double>(n)) {
    cap *= df;
    ++levels;
  }
  return levels;
}

double smallest_positive_gap(const Relation& rel) {
  double eps = kInf;
  for (int j = 0; j < rel.n_attrs(); ++j) {
    std::vector<double> vals(rel.column(j).begin(), rel.column(j).end());
    std::sort(vals.begin(), vals.end());
    for (size_t i = 1; i < vals.size(); ++i) {
      const double gap = vals[i] - vals[i - 1];
      if (gap > 0.0) eps = std::min(eps, gap);
    }
  }
  return std::isfinite(eps) ? eps : 1.0;
}

Hierarchy build_hierarchy(const Relation& rel, const HierarchyConfig& cfg) {
  Hierarchy h;
  h.base = &rel;
  h.alpha = cfg.alpha;
  h.df = cfg.partition.df;
  const int levels = hierarchy_depth(rel.n_tuples(), cfg.alpha, cfg.partition.df);
  h.eps.assign(levels + 1, 0.0);

  const Relation* current = &rel;
  for (int l = 1; l <= levels; ++l) {
    Partition part = dlv_bucketed(*current, cfg.partition);
    if (part.p() >= current->n_tuples() && current->n_tuples() > 1)
      throw std::runtime_error("degenerate partitioning: layer " + std::to_string(l) +
                               " did not shrink (" + std::to_string(part.p()) + " groups)");
    Relation reps;
    for (int j = 0; j < current->n_attrs(); ++j) {
      std::vector<double> col(part.p());
      for (int64_t g = 0; g < part.p(); ++g) col[g] = part.groups[g].rep[j];
      reps.add_column(current->attr_name(j), std::move(col));
    }
    MembershipIndex index;
    index.build(part, current->attrs_by_variance());
    h.partitions.push_back(std::move(part));
    h.indexes.push_back(std::move(index));
    h.reps.push_back(std::move(reps));
    current = &h.reps.back();
    h.eps[l] = smallest_positive_gap(*current);
  }

  // Parent links: group g of layer l-1's partition is tuple g of layer l,
  // whose own group in the next partition is the parent.
  for (int l = 0; l + 1 < static_cast<int>(h.partitions.size()); ++l) {
    Partition& next = h.partitions[l + 1];
    std::vector<int32_t> owner(h.reps[l].n_tuples(), -1);
    for (int64_t g = 0; g < next.p(); ++g)
      for (int64_t id : next.group_members(static_cast<int32_t>(g)))
        owner[id] = static_cast<int32_t>(g);
    for (int64_t g = 0; g < h.partitions[l].p(); ++g)
      h.partitions[l].groups[g].parent = owner[g];
  }
  return h;
}

void save_hierarchy(const Hierarchy& h, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json meta;
  meta["levels"] = h.levels();
  meta["alpha"] = h.alpha;
  meta["df"] = h.df;
  meta["n"] = h.base->n_tuples();
  meta["attrs"] = h.base->attr_names();
  meta["eps"] = h.eps;
  std::vector<int64_t> layer_sizes;
  for (int l = 1; l <= h.levels(); ++l) layer_sizes.push_back(h.layer(l).n_tuples());
  meta["layer_sizes"] = layer_sizes;
  {
    std::ofstream out(dir + "/hierarchy.json");
    out << meta.dump(2) << "\n";
  }
  for (int l = 1; l <= h.levels(); ++l) {
    const Relation& layer = h.reps[l - 1];
    std::vector<std::span<const double>> cols;
    for (int j = 0; j < layer.n_attrs(); ++j) cols.push_back(layer.column(j));
    write_doubles(dir + "/layer" + std::to_string(l) + ".values", cols);

    const Partition& part = h.partitions[l - 1];
    RecordWriter gw(dir + "/partition" + std::to_string(l) + ".groups");
    for (int64_t g = 0; g < part.p(); ++g) {
      const Group& grp = part.groups[g];
      gw.put(static_cast<int32_t>(g));
      gw.put(grp.parent);
      for (int j = 0; j < part.n_attrs; ++j) {
        gw.put(grp.lo[j]);
        gw.put(grp.hi[j]);
      }
      for (int j = 0; j < part.n_attrs; ++j) gw.put(grp.rep[j]);
      gw.put(grp.count);
      gw.put(grp.offset);
      gw.put(grp.count);
    }
    RecordWriter mw(dir + "/partition" + std::to_string(l) + ".members");
    for (int64_t id : part.members) mw.put(id);
  }
}

Hierarchy load_hierarchy(const Relation& base, const std::string& dir) {
  nlohmann::json meta;
  {
    std::ifstream in(dir + "/hierarchy.json");
    if (!in) throw std::runtime_error("cannot read " + dir + "/hierarchy.json");
    in >> meta;
  }
  if (meta.at("n").get<int64_t>() != base.n_tuples())
    throw std::runtime_error("hierarchy was built for a different relation size");
  Hierarchy h;
  h.base = &base;
  h.alpha = meta.at("alpha").get<int64_t>();
  h.df = meta.at("df").get<double>();
  h.eps = meta.at("eps").get<std::vector<double>>();
  const int levels = meta.at("levels").get<int>();
  const auto layer_sizes = meta.at("layer_sizes").get<std::vector<int64_t>>();
  const int k = base.n_attrs();

  const Relation* current = &base;
  for (int l = 1; l <= levels; ++l) {
    const int64_t p = layer_sizes[l - 1];
    Relation reps;
    {
      std::ifstream in(dir + "/layer" + std::to_string(l) + ".values", std::ios::binary);
      if (!in) throw std::runtime_error("missing layer values for layer " + std::to_string(l));
      for (int j = 0; j < k; ++j) {
        std::vector<double> col(p);
        in.read(reinterpret_cast<char*>(col.data()),
                static_cast<std::streamsize>(p * sizeof(double)));
        if (!in) throw std::runtime_error("truncated layer values");
        reps.add_column(base.attr_name(j), std::move(col));
      }
    }
    Partition part;
    part.n_attrs = k;
    part.source_size = current->n_tuples();
    {
      RecordReader gr(dir + "/partition" + std::to_string(l) + ".groups");
      for (int64_t g = 0; g < p; ++g) {
        Group grp;
        int32_t id;
        gr.get(id);
        gr.get(grp.parent);
        grp.lo.resize(k);
        grp.hi.resize(k);
        grp.rep.resize(k);
        for (int j = 0; j < k; ++j) {
          gr.get(grp.lo[j]);
          gr.get(grp.hi[j]);
        }
        for (int j = 0; j < k; ++j) gr.get(grp.rep[j]);
        int64_t count2;
        gr.get(grp.count);
        gr.get(grp.offset);
        gr.get(count2);
        part.groups.push_back(std::move(grp));
      }
    }
    {
      RecordReader mr(dir + "/partition" + std::to_string(l) + ".members");
      part.members.resize(current->n_tuples());
      for (int64_t& id : part.members) mr.get(id);
    }
    MembershipIndex index;
    index.build(part, current->attrs_by_variance());
    h.partitions.push_back(std::move(part));
    h.indexes.push_back(std::move(index));
    h.reps.push_back(std::move(reps));
    current = &h.reps.back();
  }
  return h;
}

}  // namespace pqe
