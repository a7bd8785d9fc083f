#include "pqe/membership_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pqe {

void MembershipIndex::build(const Partition& part, std::vector<int> attr_order) {
  k_ = part.n_attrs;
  n_groups_ = part.p();
  if (attr_order.empty()) {
    attr_order.resize(k_);
    for (int j = 0; j < k_; ++j) attr_order[j] = j;
  }
  if (static_cast<int>(attr_order.size()) != k_)
    throw std::invalid_argument("attribute order must cover all attributes");
  primary_ = attr_order[0];
  rest_.assign(attr_order.begin() + 1, attr_order.end());

  lo_.resize(n_groups_ * k_);
  hi_.resize(n_groups_ * k_);
  for (int64_t g = 0; g < n_groups_; ++g)
    for (int j = 0; j < k_; ++j) {
      lo_[g * k_ + j] = part.groups[g].lo[j];
      hi_[g * k_ + j] = part.groups[g].hi[j];
    }

  nodes_.clear();
  std::vector<int32_t> ids(n_groups_);
  for (int64_t g = 0; g < n_groups_; ++g) ids[g] = static_cast<int32_t>(g);
  root_ = ids.empty() ? -1 : build_node(ids);
}

int32_t MembershipIndex::build_node(std::vector<int32_t>& ids) {
  auto plo = [&](int32_t g) { return lo_[static_cast<int64_t>(g) * k_ + primary_]; };
  auto phi = [&](int32_t g) { return hi_[static_cast<int64_t>(g) * k_ + primary_]; };

  std::vector<double> endpoints;
  endpoints.reserve(ids.size() * 2);
  for (int32_t g : ids) {
    if (std::isfinite(plo(g))) endpoints.push_back(plo(g));
    if (std::isfinite(phi(g))) endpoints.push_back(phi(g));
  }
  const int32_t id = static_cast<int32_t>(nodes_.size());
  nodes_.emplace_back();

  std::vector<int32_t> left, right, here;
  double center = 0.0;
  if (endpoints.empty()) {
    here = ids;  // every interval is (-inf, inf)
  } else {
    std::nth_element(endpoints.begin(), endpoints.begin() + endpoints.size() / 2,
                     endpoints.end());
    center = endpoints[endpoints.size() / 2];
    for (int32_t g : ids) {
      if (phi(g) <= center)
        left.push_back(g);
      else if (plo(g) > center)
        right.push_back(g);
      else
        here.push_back(g);
    }
    // A median that fails to separate would recurse forever; keep the
    // intervals at this node instead. The query path only relies on the
    // by_lo/by_hi orderings, not on center containment.
    if (here.empty() && (left.empty() || right.empty())) {
      here = left.empty() ? std::move(right) : std::move(left);
      left.clear();
      right.clear();
    }
  }

  nodes_[id].center = center;
  nodes_[id].by_lo = here;
  std::sort(nodes_[id].by_lo.begin(), nodes_[id].by_lo.end(),
            [&](int32_t a, int32_t b) { return plo(a) < plo(b); });
  nodes_[id].by_hi = std::move(here);
  std::sort(nodes_[id].by_hi.begin(), nodes_[id].by_hi.end(),
            [&](int32_t a, int32_t b) { return phi(a) > phi(b); });
  if (!left.empty()) nodes_[id].left = build_node(left);
  if (!right.empty()) nodes_[id].right = build_node(right);
  return id;
}

bool MembershipIndex::in_box(int32_t g, std::span<const double> point) const {
  const int64_t base = static_cast<int64_t>(g) * k_;
  for (int j = 0; j < k_; ++j) {
    const double v = point[j];
    if (!(v >= lo_[base + j] && v < hi_[base + j])) return false;
  }
  return true;
}

std::optional<int32_t> MembershipIndex::get_group(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != k_)
    throw std::invalid_argument("point dimension mismatch");
  const double t = point[primary_];
  if (std::isnan(t)) return std::nullopt;
  int32_t node = root_;
  while (node >= 0) {
    const Node& nd = nodes_[node];
    if (t <= nd.center) {
      for (int32_t g : nd.by_lo) {
        if (lo_[static_cast<int64_t>(g) * k_ + primary_] > t) break;
        if (in_box(g, point)) return g;
      }
      node = nd.left;
    } else {
      for (int32_t g : nd.by_hi) {
        if (hi_[static_cast<int64_t>(g) * k_ + primary_] <= t) break;
        if (in_box(g, point)) return g;
      }
      node = nd.right;
    }
  }
  return std::nullopt;
}

}  // namespace pqe
