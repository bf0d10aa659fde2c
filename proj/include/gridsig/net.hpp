#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gridsig {

enum class Axis : std::uint8_t { NS = 0, WE = 1 };

const char* to_string(Axis axis);

struct NodeId {
    std::string label;
    int row = 0;
    int col = 0;
};

struct Node {
    NodeId id;
    bool signalized = false;
};

struct Link {
    int id = 0;
    int from = 0;  // node index
    int to = 0;    // node index
    double length = 0.0;
    int lanes = 0;
    Axis axis = Axis::NS;
    int route = 0;        // index of the OD route this link belongs to
    int route_index = 0;  // position of this link along its route
};

struct Movement {
    int link = 0;
    int lane = 0;

    bool operator==(const Movement&) const = default;
};

struct Phase {
    int index = 0;
    Axis served_axis = Axis::NS;
    std::vector<Movement> movements;
};

/// A signalized interior node. Phase 0 serves NS, phase 1 serves WE.
struct Intersection {
    int node = 0;
    std::array<Phase, 2> phases;
    std::array<int, 2> incoming{};  // indexed by Axis
    std::array<int, 2> outgoing{};  // indexed by Axis
};

struct Route {
    std::string name;  // origin label followed by destination label, e.g. "A2F2"
    Axis axis = Axis::NS;
    int origin = 0;
    int destination = 0;
    std::vector<int> links;
};

/// Grid of one-way straight corridors: W-E rows and N-S columns crossing at
/// signalized interior nodes. Immutable after build_grid().
class GridNetwork {
public:
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<Intersection>& intersections() const { return intersections_; }
    const std::vector<Route>& routes() const { return routes_; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    const Link& link(int id) const { return links_.at(static_cast<std::size_t>(id)); }
    const Route& route(int id) const { return routes_.at(static_cast<std::size_t>(id)); }

    /// Next link along the link's route, or -1 for an exit link.
    int next_link(int link_id) const;

    /// Intersection index at the downstream end of a link, or -1 for exit links.
    int controlling_intersection(int link_id) const { return link_intersection_.at(static_cast<std::size_t>(link_id)); }

    int find_node(const std::string& label) const;
    int find_route(const std::string& name) const;

private:
    friend GridNetwork build_grid(int rows, int cols, double link_length, int lanes);

    int rows_ = 0;
    int cols_ = 0;
    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::vector<Intersection> intersections_;
    std::vector<Route> routes_;
    std::vector<int> link_intersection_;
};

/// Builds a rows x cols grid of signalized intersections surrounded by
/// unsignalized boundary nodes. Columns are lettered from the west (A is the
/// west boundary) and rows numbered from the north (1 is the north boundary),
/// so the default 4x4 grid has routes A2F2..A5F5 and B1B6..E1E6.
GridNetwork build_grid(int rows, int cols, double link_length, int lanes);

constexpr double kDefaultVehicleLength = 5.0;
constexpr double kDefaultMinGap = 2.5;

/// Vehicles that fit in one lane of the link when stopped bumper to bumper.
int lane_capacity(const Link& link,
                  double vehicle_length = kDefaultVehicleLength,
                  double min_gap = kDefaultMinGap);

/// Sum of lane capacities over a phase's incoming movements.
int phase_capacity(const GridNetwork& net, const Phase& phase,
                   double vehicle_length = kDefaultVehicleLength,
                   double min_gap = kDefaultMinGap);

/// Spreadsheet-style column letters: 0 -> "A", 25 -> "Z", 26 -> "AA".
std::string column_letters(int col);

}  // namespace gridsig
