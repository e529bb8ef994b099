#include "rz/flows.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <random>

namespace rz {

Footprint footprint_of(const Flight& flight) {
  Footprint out;
  out.reserve(flight.crossings.size());
  for (const Crossing& c : flight.crossings) out.push_back(c.tv);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double jaccard(std::span<const VolumeIdx> a, std::span<const VolumeIdx> b) {
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

double jaccard(const Flight& f, const Flight& g) {
  return jaccard(footprint_of(f), footprint_of(g));
}

SimilarityGraph build_graph(const Scenario& scenario, std::span<const FlightIdx> flights,
                            double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("build_graph: threshold must lie in (0, 1)");
  }
  SimilarityGraph g;
  g.flights.assign(flights.begin(), flights.end());
  const auto n = static_cast<std::int64_t>(flights.size());
  g.adjacency.assign(flights.size(), {});
  // Rows are independent; each thread fills its own neighbour lists.
#pragma omp parallel for schedule(dynamic, 16) if (n > 256)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto fi = scenario.footprint(flights[i]);
    auto& row = g.adjacency[static_cast<std::size_t>(i)];
    for (std::int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (jaccard(fi, scenario.footprint(flights[j])) >= threshold) {
        row.push_back(static_cast<std::uint32_t>(j));
      }
    }
  }
  std::size_t degree_sum = 0;
  for (const auto& row : g.adjacency) degree_sum += row.size();
  g.num_edges = degree_sum / 2;
  return g;
}

namespace {

// Symmetric weighted graph; a self loop (i, i, w) appears once in row i.
struct WeightedGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> degree;
  double total = 0.0;

  void finalize() {
    degree.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (const auto& [j, w] : adj[i]) degree[i] += w;
    }
    total = std::accumulate(degree.begin(), degree.end(), 0.0);
  }
};

WeightedGraph from_similarity(const SimilarityGraph& sg) {
  WeightedGraph g;
  g.n = static_cast<int>(sg.num_vertices());
  g.adj.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    for (std::uint32_t j : sg.adjacency[i]) g.adj[i].push_back({static_cast<int>(j), 1.0});
  }
  g.finalize();
  return g;
}

constexpr double kGainEps = 1e-12;

std::vector<int> shuffled_order(int n, std::mt19937_64& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Queue-based local moving. Returns true if any node changed community.
bool move_nodes(const WeightedGraph& g, std::vector<int>& comm, double gamma,
                std::mt19937_64& rng) {
  if (g.total <= 0.0) return false;
  std::vector<double> tot(g.n, 0.0);
  std::vector<int> size(g.n, 0);
  for (int i = 0; i < g.n; ++i) {
    tot[comm[i]] += g.degree[i];
    ++size[comm[i]];
  }
  std::vector<int> free_ids;
  for (int c = g.n - 1; c >= 0; --c) {
    if (size[c] == 0) free_ids.push_back(c);
  }

  std::deque<int> queue;
  std::vector<char> queued(g.n, 1);
  for (int i : shuffled_order(g.n, rng)) queue.push_back(i);

  std::vector<double> link(g.n, 0.0);
  std::vector<int> touched;
  bool changed = false;
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    queued[i] = 0;
    const int old_c = comm[i];
    const double ki = g.degree[i];

    touched.clear();
    for (const auto& [j, w] : g.adj[i]) {
      if (j == i) continue;
      const int c = comm[j];
      if (link[c] == 0.0) touched.push_back(c);
      link[c] += w;
    }
    std::sort(touched.begin(), touched.end());

    tot[old_c] -= ki;
    --size[old_c];
    int best = old_c;
    double best_gain = link[old_c] - gamma * ki * tot[old_c] / g.total;
    for (int c : touched) {
      if (c == old_c) continue;
      const double gain = link[c] - gamma * ki * tot[c] / g.total;
      if (gain > best_gain + kGainEps) {
        best = c;
        best_gain = gain;
      }
    }
    if (best_gain < -kGainEps && size[old_c] > 0) {
      // Isolating the node beats every neighbouring community.
      best = free_ids.back();
      free_ids.pop_back();
    }
    tot[best] += ki;
    ++size[best];
    if (size[old_c] == 0 && best != old_c) free_ids.push_back(old_c);
    for (int c : touched) link[c] = 0.0;

    if (best != old_c) {
      comm[i] = best;
      changed = true;
      for (const auto& [j, w] : g.adj[i]) {
        if (j != i && comm[j] != best && !queued[j]) {
          queued[j] = 1;
          queue.push_back(j);
        }
      }
    }
  }
  return changed;
}

// Merges singletons inside each community into well-connected sub-communities.
std::vector<int> refine(const WeightedGraph& g, const std::vector<int>& part, double gamma,
                        std::mt19937_64& rng) {
  std::vector<int> refined(g.n);
  std::iota(refined.begin(), refined.end(), 0);
  std::vector<double> tot_part(g.n, 0.0);
  for (int i = 0; i < g.n; ++i) tot_part[part[i]] += g.degree[i];
  std::vector<double> tot_ref(g.degree);
  std::vector<int> size_ref(g.n, 1);
  // Edge weight from each refined community to the rest of its parent community.
  std::vector<double> external(g.n, 0.0);
  for (int i = 0; i < g.n; ++i) {
    for (const auto& [j, w] : g.adj[i]) {
      if (j != i && part[j] == part[i]) external[i] += w;
    }
  }

  std::vector<double> link(g.n, 0.0);
  std::vector<int> touched;
  for (int v : shuffled_order(g.n, rng)) {
    if (size_ref[refined[v]] != 1) continue;
    const int c = part[v];
    const double kv = g.degree[v];
    if (external[v] + kGainEps < gamma * kv * (tot_part[c] - kv) / g.total) continue;

    touched.clear();
    for (const auto& [j, w] : g.adj[v]) {
      if (j == v || part[j] != c) continue;
      const int r = refined[j];
      if (link[r] == 0.0) touched.push_back(r);
      link[r] += w;
    }
    std::sort(touched.begin(), touched.end());
    int best = -1;
    double best_gain = 0.0;
    for (int r : touched) {
      if (r == refined[v]) continue;
      const bool well_connected =
          external[r] + kGainEps >= gamma * tot_ref[r] * (tot_part[c] - tot_ref[r]) / g.total;
      if (!well_connected) continue;
      const double gain = link[r] - gamma * kv * tot_ref[r] / g.total;
      if (gain >= -kGainEps && (best < 0 || gain > best_gain + kGainEps)) {
        best = r;
        best_gain = gain;
      }
    }
    if (best >= 0) {
      const int own = refined[v];
      external[best] += external[own] - 2.0 * link[best];
      tot_ref[best] += kv;
      ++size_ref[best];
      tot_ref[own] = 0.0;
      size_ref[own] = 0;
      refined[v] = best;
    }
    for (int r : touched) link[r] = 0.0;
  }
  return refined;
}

// Relabels to 0..k-1 in order of first appearance; returns k.
int compact(std::vector<int>& labels) {
  std::vector<int> map(labels.size(), -1);
  int next = 0;
  for (int& l : labels) {
    if (map[l] < 0) map[l] = next++;
    l = map[l];
  }
  return next;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<int>& labels, int k) {
  WeightedGraph out;
  out.n = k;
  out.adj.resize(k);
  std::vector<std::map<int, double>> rows(k);
  for (int i = 0; i < g.n; ++i) {
    for (const auto& [j, w] : g.adj[i]) rows[labels[i]][labels[j]] += w;
  }
  for (int a = 0; a < k; ++a) {
    for (const auto& [b, w] : rows[a]) out.adj[a].push_back({b, w});
  }
  out.finalize();
  return out;
}

}  // namespace

std::vector<int> detect_communities(const SimilarityGraph& graph, const CommunityOptions& options) {
  const int n = static_cast<int>(graph.num_vertices());
  std::vector<int> node_of(n);
  std::iota(node_of.begin(), node_of.end(), 0);
  if (n == 0) return {};

  std::mt19937_64 rng(options.seed);
  WeightedGraph g = from_similarity(graph);
  std::vector<int> part(n);
  std::iota(part.begin(), part.end(), 0);

  for (int level = 0; level < options.max_levels; ++level) {
    move_nodes(g, part, options.resolution, rng);
    std::vector<int> coarse = part;
    const int num_parts = compact(coarse);
    if (num_parts == g.n) {
      part = coarse;
      break;
    }
    std::vector<int> refined = refine(g, coarse, options.resolution, rng);
    int num_refined = compact(refined);
    if (num_refined == g.n) {
      // Refinement found nothing to merge; aggregate the coarse partition instead.
      refined = coarse;
      num_refined = num_parts;
    }
    std::vector<int> next_part(num_refined, 0);
    for (int x = 0; x < g.n; ++x) next_part[refined[x]] = coarse[x];
    for (int& node : node_of) node = refined[node];
    g = aggregate(g, refined, num_refined);
    part = std::move(next_part);
  }

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = part[node_of[i]];
  compact(labels);
  return labels;
}

double modularity(const SimilarityGraph& graph, std::span<const int> labels, double resolution) {
  const std::size_t n = graph.num_vertices();
  double two_m = 0.0;
  std::map<int, double> internal;
  std::map<int, double> tot;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(graph.adjacency[i].size());
    two_m += k;
    tot[labels[i]] += k;
    for (std::uint32_t j : graph.adjacency[i]) {
      if (labels[j] == labels[i]) internal[labels[i]] += 1.0;
    }
  }
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (const auto& [c, t] : tot) {
    q += internal[c] / two_m - resolution * (t / two_m) * (t / two_m);
  }
  return q;
}

void ExtractionParams::validate() const {
  if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0)) {
    throw ValidationError("similarity threshold must lie in (0, 1)");
  }
  if (!(resolution > 0.0)) throw ValidationError("resolution must be positive");
  if (min_flights_per_flow < 1) throw ValidationError("min_flights_per_flow must be >= 1");
}

const TouchedWindow* Flow::window_at(VolumeIdx v) const {
  auto it = std::lower_bound(windows.begin(), windows.end(), v,
                             [](const TouchedWindow& w, VolumeIdx key) { return w.tv < key; });
  return it != windows.end() && it->tv == v ? &*it : nullptr;
}

Flow make_flow(const Scenario& scenario, const DelayVector& delays, const Hotspot& hotspot,
               std::vector<FlightIdx> members, int id) {
  const TimeGrid& grid = scenario.grid();
  Flow flow;
  flow.id = id;
  flow.hotspot = hotspot;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  flow.members = std::move(members);

  std::map<VolumeIdx, std::vector<int>> entries;
  const Ticks day = grid.day_ticks();
  for (FlightIdx f : flow.members) {
    const Ticks shift = static_cast<Ticks>(delays[f]) * kTicksPerMinute;
    for (const Crossing& c : scenario.flight(f).crossings) {
      flow.footprint.push_back(c.tv);
      const Ticks t = c.entry + shift;
      if (t >= day) continue;
      auto& row = entries[c.tv];
      if (row.empty()) row.assign(grid.num_bins, 0);
      ++row[bin_of_ticks(t, grid)];
    }
  }
  std::sort(flow.footprint.begin(), flow.footprint.end());
  flow.footprint.erase(std::unique(flow.footprint.begin(), flow.footprint.end()),
                       flow.footprint.end());

  for (auto& [tv, row] : entries) {
    TouchedWindow w;
    w.tv = tv;
    const auto first = std::find_if(row.begin(), row.end(), [](int e) { return e > 0; });
    const auto last = std::find_if(row.rbegin(), row.rend(), [](int e) { return e > 0; });
    w.lo = static_cast<int>(first - row.begin());
    w.hi = static_cast<int>(row.rend() - last) - 1;
    w.attributed_demand.assign(grid.num_bins, 0);
    std::vector<int> unused_excess(grid.num_bins, 0);
    const std::vector<int> no_capacity(grid.num_bins, 0);
    roll_demand_row(row, no_capacity, grid.rolling_window_bins, w.attributed_demand,
                    unused_excess);
    w.attributed_entries = std::move(row);
    flow.windows.push_back(std::move(w));
  }
  return flow;
}

FlowExtraction extract_flows(const Hotspot& hotspot, const Scenario& scenario,
                             const DelayVector& delays, const ExtractionParams& params) {
  params.validate();
  FlowExtraction out;
  const auto contributing =
      window_flights(scenario, delays, hotspot.tv, hotspot.t_start, hotspot.t_end);
  if (contributing.empty()) return out;

  std::vector<FlightIdx> flights;
  flights.reserve(contributing.size());
  for (const RegulatedFlight& rf : contributing) flights.push_back(rf.flight);
  std::sort(flights.begin(), flights.end());

  const SimilarityGraph graph = build_graph(scenario, flights, params.similarity_threshold);
  const std::vector<int> labels =
      detect_communities(graph, {params.resolution, params.seed, 32});
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<FlightIdx>> groups(k);
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(flights[i]);

  for (auto& members : groups) {
    const bool eligible = static_cast<int>(members.size()) >= params.min_flights_per_flow;
    auto& bucket = eligible ? out.flows : out.discarded;
    bucket.push_back(make_flow(scenario, delays, hotspot, std::move(members),
                               static_cast<int>(bucket.size())));
  }
  return out;
}

}  // namespace rz
