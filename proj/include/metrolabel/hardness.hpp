// Compiles planar monotone 3-SAT formulas into single-line labeling
// instances built from chain, fork, clause and variable gadgets (octilinear
// labels only).
#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "metrolabel/cost.hpp"
#include "metrolabel/styles.hpp"

namespace metrolabel {

class UnrealizableRoute : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EmbeddingConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InvalidFormula : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Literals are 1-based signed variable indices; positive clauses hold only
// positive literals, negative clauses only negative ones.
struct MonotoneFormula {
  int num_vars = 0;
  std::vector<std::array<int, 3>> positive_clauses;
  std::vector<std::array<int, 3>> negative_clauses;
  // Planar embedding: left-to-right variable order (1-based) and one level
  // per clause, 1 being closest to the variable row. Empty means "not given".
  std::vector<int> order;
  std::vector<int> positive_levels;
  std::vector<int> negative_levels;
};

// Throws InvalidFormula on malformed literals or embedding fields.
void validate(const MonotoneFormula& f);
bool evaluate(const MonotoneFormula& f, const std::vector<bool>& assignment);  // index 0 = x1
bool satisfiable(const MonotoneFormula& f);

// Tries every variable order and derives levels from span nesting; nullopt
// when no order admits a crossing-free layout.
std::optional<MonotoneFormula> with_embedding(MonotoneFormula f);

enum class Heading { North, East, South, West };

// Label slots around a stop. Up/Down/Left/Right are centred on the stop's
// axis; the corner slots are shifted half a label sideways; the diagonal
// slots are squares turned by 45 degrees.
enum class LabelSlot {
  Up, Down, Left, Right,
  UpLeft, UpRight, DownLeft, DownRight,
  NorthEast, NorthWest, SouthEast, SouthWest
};
enum class Polarity { None, Positive, Negative };
enum class GadgetKind { Chain, Fork, Clause, Variable, Formula };

struct LabelGeometry {
  double size = 20.0;    // square label side
  double offset = 20.0;  // stop clearance radius
};

SimplePolygon slot_shape(Point stop, LabelSlot slot, const LabelGeometry& g = {});
BBox slot_box(Point stop, LabelSlot slot, const LabelGeometry& g = {});

struct SelectableLabel {
  LabelSlot slot;
  Polarity polarity = Polarity::None;
};

struct GadgetStop {
  std::string id;
  Point position;
  SegmentKind segment = SegmentKind::Horizontal;  // Horizontal or Vertical
  std::vector<SelectableLabel> selectable;
  StopCandidates candidates;  // selectable labels plus the style placements the boundary crosses
};

struct LabelRef {
  int stop = 0;
  int label = 0;  // index into GadgetStop::selectable
  friend auto operator<=>(const LabelRef&, const LabelRef&) = default;
};

struct Gadget {
  GadgetKind kind = GadgetKind::Chain;
  int length = 0;  // chain
  int negative_ports = 0, positive_ports = 0;  // variable: s and t
  std::vector<GadgetStop> stops;
  std::vector<std::pair<LabelRef, LabelRef>> links;  // prescribed intersections
  std::vector<LabelRef> ports;
  std::vector<Polarity> forks;  // variable: one entry per fork
  SimplePolygon boundary;
  std::vector<Point> line;  // boundary cut open; candidates are computed against it

  SimplePolygon label_shape(LabelRef r, const LabelGeometry& g = {}) const;
  BBox label_box(LabelRef r, const LabelGeometry& g = {}) const;
};

inline constexpr int kDefaultSpacing = 60;

// `route` gives the travel direction at each stop; consecutive equal
// directions are straight steps of `spacing`, perpendicular ones a turn.
Gadget build_chain(int length, Point origin, const std::vector<Heading>& route, int spacing = kDefaultSpacing);
// `travel`: direction of the incoming chain; `branch`: perpendicular
// direction of the split-off chain.
Gadget build_fork(Point origin, Heading travel, Heading branch, Polarity polarity);
Gadget build_clause(Point origin, bool above);
// s negative and t positive free ports; positive ports above the origin row.
Gadget build_variable(int s, int t, Point origin);

// Single-line map plus the candidate sets of the reduction.
struct Reduction {
  MetroMap map;
  MapCandidates candidates;
  Gadget layout;  // every stop and prescribed intersection, kind Formula
  // Per variable: the stop whose lower label encodes "true".
  std::vector<std::string> variable_stops;
  std::vector<BBox> true_labels;
};

struct ReduceOptions {
  int spacing = kDefaultSpacing;
};

// Requires an embedding (see with_embedding). Throws EmbeddingConflict if
// the embedding crosses or the line cannot be routed.
Reduction reduce(const MonotoneFormula& f, const ReduceOptions& opts = {});

// Map with the gadget boundary cut open as its only line; candidates as in
// the gadget.
struct GadgetInstance {
  MetroMap map;
  MapCandidates candidates;
};
GadgetInstance instance_of(const Gadget& g);

// Truth assignment read off a labeling of a reduction.
std::vector<bool> assignment_of(const Reduction& r, const Labeling& labeling);

// Pairs of selectable labels of different stops that intersect.
std::vector<std::pair<LabelRef, LabelRef>> selectable_intersections(const Gadget& g);

}  // namespace metrolabel
