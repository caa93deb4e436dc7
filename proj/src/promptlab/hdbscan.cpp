#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "forge3d/common/error.hpp"
#include "forge3d/promptlab/promptlab.hpp"

namespace forge3d::promptlab {
namespace {

struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

struct CondensedRow {
  std::size_t parent = 0;
  std::size_t child = 0;
  double lambda = 0.0;
  std::size_t size = 0;
};

double lambda_of(double distance) { return 1.0 / std::max(distance, 1e-12); }

double dist(const imaging::Point2& a, const imaging::Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Prim's algorithm on the dense mutual-reachability graph, then a
// union-find pass that turns the sorted MST edges into a dendrogram.
std::vector<Merge> single_linkage(const std::vector<imaging::Point2>& pts, std::size_t min_samples) {
  const std::size_t n = pts.size();
  std::vector<double> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = dist(pts[i], pts[j]);
    const std::size_t k = std::min(min_samples, n) - 1;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    core[i] = d[k];
  }
  const auto mreach = [&](std::size_t a, std::size_t b) {
    return std::max({core[a], core[b], dist(pts[a], pts[b])});
  };

  struct Edge {
    std::size_t a, b;
    double w;
  };
  std::vector<Edge> edges;
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(n, 0);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double w = mreach(current, j);
      if (w < best[j]) {
        best[j] = w;
        from[j] = current;
      }
      if (next == n || best[j] < best[next]) next = j;
    }
    in_tree[next] = true;
    edges.push_back({from[next], next, best[next]});
    current = next;
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });

  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> size(2 * n - 1, 1);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<Merge> merges;
  std::size_t next_label = n;
  for (const auto& e : edges) {
    const std::size_t ra = find(e.a);
    const std::size_t rb = find(e.b);
    size[next_label] = size[ra] + size[rb];
    merges.push_back({ra, rb, e.w, size[next_label]});
    parent[ra] = parent[rb] = next_label;
    ++next_label;
  }
  return merges;
}

std::vector<CondensedRow> condense(const std::vector<Merge>& merges, std::size_t n,
                                   std::size_t min_cluster_size) {
  const std::size_t root = 2 * n - 2;
  const auto node_size = [&](std::size_t node) { return node < n ? std::size_t{1} : merges[node - n].size; };
  const auto leaves_of = [&](std::size_t node) {
    std::vector<std::size_t> out, stack{node};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (v < n) {
        out.push_back(v);
      } else {
        stack.push_back(merges[v - n].left);
        stack.push_back(merges[v - n].right);
      }
    }
    return out;
  };

  std::vector<CondensedRow> rows;
  std::vector<std::size_t> relabel(2 * n - 1, 0);
  std::size_t next_cluster = n + 1;
  relabel[root] = n;
  std::vector<std::size_t> queue{root};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t node = queue[qi];
    const Merge& m = merges[node - n];
    const double lambda = lambda_of(m.distance);
    const std::size_t ls = node_size(m.left);
    const std::size_t rs = node_size(m.right);
    const std::size_t label = relabel[node];
    const auto fall_out = [&](std::size_t sub) {
      for (const auto leaf : leaves_of(sub)) rows.push_back({label, leaf, lambda, 1});
    };
    if (ls >= min_cluster_size && rs >= min_cluster_size) {
      for (const auto child : {m.left, m.right}) {
        relabel[child] = next_cluster++;
        rows.push_back({label, relabel[child], lambda, node_size(child)});
        queue.push_back(child);
      }
    } else if (ls < min_cluster_size && rs < min_cluster_size) {
      fall_out(m.left);
      fall_out(m.right);
    } else {
      const std::size_t big = ls >= min_cluster_size ? m.left : m.right;
      const std::size_t small = big == m.left ? m.right : m.left;
      fall_out(small);
      if (big >= n) {
        relabel[big] = label;
        queue.push_back(big);
      } else {
        rows.push_back({label, big, lambda, 1});
      }
    }
  }
  return rows;
}

// Excess-of-mass selection over the condensed tree; returns selected cluster
// labels.
std::vector<std::size_t> select_clusters(const std::vector<CondensedRow>& rows, std::size_t n) {
  std::size_t max_label = n;
  for (const auto& r : rows) max_label = std::max(max_label, r.parent);
  for (const auto& r : rows) {
    if (r.size > 1) max_label = std::max(max_label, r.child);
  }
  const std::size_t count = max_label - n + 1;
  std::vector<double> birth(count, 0.0);
  for (const auto& r : rows) {
    if (r.child >= n) birth[r.child - n] = r.lambda;
  }
  std::vector<double> stability(count, 0.0);
  std::vector<std::vector<std::size_t>> children(count);
  for (const auto& r : rows) {
    const std::size_t p = r.parent - n;
    stability[p] += (r.lambda - birth[p]) * static_cast<double>(r.size);
    if (r.child >= n) children[p].push_back(r.child - n);
  }

  std::vector<bool> selected(count, true);
  const auto deselect_below = [&](std::size_t c) {
    std::vector<std::size_t> stack = children[c];
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      selected[v] = false;
      stack.insert(stack.end(), children[v].begin(), children[v].end());
    }
  };
  // Children always carry larger labels than their parent.
  for (std::size_t c = count; c-- > 0;) {
    double subtree = 0.0;
    for (const auto ch : children[c]) subtree += stability[ch];
    if (children[c].empty()) continue;
    if (subtree > stability[c]) {
      selected[c] = false;
      stability[c] = subtree;
    } else {
      deselect_below(c);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < count; ++c) {
    if (selected[c]) out.push_back(c + n);
  }
  return out;
}

// Point -> selected cluster label, or n + count (noise).
std::vector<long> label_points(const std::vector<CondensedRow>& rows, std::size_t n,
                               const std::vector<std::size_t>& selected) {
  std::map<std::size_t, std::size_t> parent_of;   // condensed node -> parent
  std::vector<double> point_lambda(n, 0.0);
  std::vector<std::size_t> point_parent(n, n);
  double root_max_lambda = 0.0;
  for (const auto& r : rows) {
    if (r.child >= n) parent_of[r.child] = r.parent;
    else {
      point_lambda[r.child] = r.lambda;
      point_parent[r.child] = r.parent;
    }
    if (r.parent == n) root_max_lambda = std::max(root_max_lambda, r.lambda);
  }
  const auto is_selected = [&](std::size_t c) {
    return std::find(selected.begin(), selected.end(), c) != selected.end();
  };
  std::vector<long> labels(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = point_parent[i];
    while (!is_selected(c) && c != n) c = parent_of.at(c);
    if (!is_selected(c)) continue;
    if (c == n && point_lambda[i] < root_max_lambda) continue;
    labels[i] = static_cast<long>(c);
  }
  return labels;
}

} // namespace

ClusterResult cluster(const std::vector<imaging::Point2>& points, const std::vector<std::string>& ids,
                      std::size_t min_cluster_size) {
  if (ids.size() != points.size()) {
    throw Error(ErrorCode::invalid_argument, "cluster ids and points differ in length", "promptlab");
  }
  if (min_cluster_size < 2) min_cluster_size = 2;
  const std::size_t n = points.size();
  ClusterResult result;
  result.points = points;
  result.labels.assign(n, kMiscCluster);
  if (n < min_cluster_size || n < 2) {
    result.misc_size = n;
    return result;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ids[a] < ids[b];
  });
  std::vector<imaging::Point2> canon(n);
  for (std::size_t i = 0; i < n; ++i) canon[i] = points[order[i]];

  const auto merges = single_linkage(canon, min_cluster_size);
  const auto rows = condense(merges, n, min_cluster_size);
  const auto selected = select_clusters(rows, n);
  const auto raw = label_points(rows, n, selected);

  // Canonical numbering: by first appearance in id order.
  std::map<long, int> renumber;
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i] < 0) continue;
    if (renumber.try_emplace(raw[i], static_cast<int>(renumber.size())).second) {
      result.sizes.push_back(0);
    }
    const int label = renumber[raw[i]];
    result.labels[order[i]] = label;
    ++result.sizes[static_cast<std::size_t>(label)];
  }
  result.misc_size = static_cast<std::size_t>(
      std::count(result.labels.begin(), result.labels.end(), kMiscCluster));
  return result;
}

} // namespace forge3d::promptlab
