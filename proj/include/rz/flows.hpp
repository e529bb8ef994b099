#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rz/fpfs.hpp"
#include "rz/traffic_model.hpp"

namespace rz {

/// Sorted distinct volumes.
using Footprint = std::vector<VolumeIdx>;

Footprint footprint_of(const Flight& flight);

/// Jaccard similarity of two sorted footprints; 0 when both are empty.
double jaccard(std::span<const VolumeIdx> a, std::span<const VolumeIdx> b);
double jaccard(const Flight& f, const Flight& g);

/// Undirected graph with binary edges over a list of flights.
struct SimilarityGraph {
  std::vector<FlightIdx> flights;                  // vertex -> flight
  std::vector<std::vector<std::uint32_t>> adjacency;  // sorted neighbour lists
  std::size_t num_edges = 0;

  std::size_t num_vertices() const { return flights.size(); }
};

/// Edge between two flights iff their footprint Jaccard similarity is >= threshold.
SimilarityGraph build_graph(const Scenario& scenario, std::span<const FlightIdx> flights,
                            double threshold);

struct CommunityOptions {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  int max_levels = 32;
};

/// Modularity-maximizing partition (local moving, refinement, aggregation).
/// Returns a community label per vertex; labels are 0..k-1 ordered by the
/// smallest vertex they contain. Communities never span disconnected components.
std::vector<int> detect_communities(const SimilarityGraph& graph, const CommunityOptions& options);

/// Modularity of a labelling at the given resolution.
double modularity(const SimilarityGraph& graph, std::span<const int> labels, double resolution);

struct ExtractionParams {
  double similarity_threshold = 0.72;
  double resolution = 1.0;
  int min_flights_per_flow = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Member entry span at one footprint volume, plus the members' rolling-hour demand there.
struct TouchedWindow {
  VolumeIdx tv = 0;
  int lo = 0;
  int hi = 0;
  std::vector<int> attributed_entries;  // member entries per bin
  std::vector<int> attributed_demand;   // member rolling-hour demand per bin
};

struct Flow {
  int id = 0;
  Hotspot hotspot;
  std::vector<FlightIdx> members;  // sorted
  Footprint footprint;
  std::vector<TouchedWindow> windows;  // one per footprint volume with an in-day member entry

  const TouchedWindow* window_at(VolumeIdx v) const;
};

/// Materializes a flow for `members` under the current delays.
Flow make_flow(const Scenario& scenario, const DelayVector& delays, const Hotspot& hotspot,
               std::vector<FlightIdx> members, int id = 0);

struct FlowExtraction {
  std::vector<Flow> flows;       // communities of at least min_flights_per_flow
  std::vector<Flow> discarded;   // smaller communities, kept for diagnostics
};

FlowExtraction extract_flows(const Hotspot& hotspot, const Scenario& scenario,
                             const DelayVector& delays, const ExtractionParams& params);

}  // namespace rz
