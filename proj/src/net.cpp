#include "gridsig/net.hpp"

#include <cmath>
#include <stdexcept>

namespace gridsig {

const char* to_string(Axis axis) {
    return axis == Axis::NS ? "NS" : "WE";
}

std::string column_letters(int col) {
    if (col < 0) {
        throw std::invalid_argument("column index must be non-negative");
    }
    std::string out;
    int n = col + 1;
    while (n > 0) {
        int rem = (n - 1) % 26;
        out.insert(out.begin(), static_cast<char>('A' + rem));
        n = (n - 1) / 26;
    }
    return out;
}

int GridNetwork::next_link(int link_id) const {
    const Link& l = link(link_id);
    const Route& r = route(l.route);
    auto next = static_cast<std::size_t>(l.route_index) + 1;
    return next < r.links.size() ? r.links[next] : -1;
}

int GridNetwork::find_node(const std::string& label) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id.label == label) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

int GridNetwork::find_route(const std::string& name) const {
    for (std::size_t i = 0; i < routes_.size(); ++i) {
        if (routes_[i].name == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

GridNetwork build_grid(int rows, int cols, double link_length, int lanes) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("grid needs at least one row and one column");
    }
    if (!(link_length > 0.0) || !std::isfinite(link_length)) {
        throw std::invalid_argument("link length must be positive");
    }
    if (lanes < 1) {
        throw std::invalid_argument("links need at least one lane");
    }

    GridNetwork net;
    net.rows_ = rows;
    net.cols_ = cols;

    // Node lattice is (rows + 2) x (cols + 2) without the four corners.
    std::vector<std::vector<int>> index(static_cast<std::size_t>(rows + 2),
                                        std::vector<int>(static_cast<std::size_t>(cols + 2), -1));
    for (int r = 0; r < rows + 2; ++r) {
        for (int c = 0; c < cols + 2; ++c) {
            bool row_edge = (r == 0 || r == rows + 1);
            bool col_edge = (c == 0 || c == cols + 1);
            if (row_edge && col_edge) {
                continue;
            }
            Node node;
            node.id = NodeId{column_letters(c) + std::to_string(r + 1), r, c};
            node.signalized = !row_edge && !col_edge;
            index[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = static_cast<int>(net.nodes_.size());
            net.nodes_.push_back(std::move(node));
        }
    }
    auto at = [&](int r, int c) { return index[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]; };

    auto add_route = [&](Axis axis, int from_node, int to_node, const std::vector<std::pair<int, int>>& cells) {
        Route route;
        route.axis = axis;
        route.origin = from_node;
        route.destination = to_node;
        route.name = net.nodes_[static_cast<std::size_t>(from_node)].id.label +
                     net.nodes_[static_cast<std::size_t>(to_node)].id.label;
        int route_id = static_cast<int>(net.routes_.size());
        for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
            Link link;
            link.id = static_cast<int>(net.links_.size());
            link.from = at(cells[i].first, cells[i].second);
            link.to = at(cells[i + 1].first, cells[i + 1].second);
            link.length = link_length;
            link.lanes = lanes;
            link.axis = axis;
            link.route = route_id;
            link.route_index = static_cast<int>(i);
            route.links.push_back(link.id);
            net.links_.push_back(link);
        }
        net.routes_.push_back(std::move(route));
    };

    // W-E corridors, one per interior row.
    for (int r = 1; r <= rows; ++r) {
        std::vector<std::pair<int, int>> cells;
        for (int c = 0; c <= cols + 1; ++c) {
            cells.emplace_back(r, c);
        }
        add_route(Axis::WE, at(r, 0), at(r, cols + 1), cells);
    }
    // N-S corridors, one per interior column.
    for (int c = 1; c <= cols; ++c) {
        std::vector<std::pair<int, int>> cells;
        for (int r = 0; r <= rows + 1; ++r) {
            cells.emplace_back(r, c);
        }
        add_route(Axis::NS, at(0, c), at(rows + 1, c), cells);
    }

    std::vector<int> node_intersection(net.nodes_.size(), -1);
    for (int r = 1; r <= rows; ++r) {
        for (int c = 1; c <= cols; ++c) {
            node_intersection[static_cast<std::size_t>(at(r, c))] = static_cast<int>(net.intersections_.size());
            Intersection inter;
            inter.node = at(r, c);
            net.intersections_.push_back(inter);
        }
    }

    net.link_intersection_.assign(net.links_.size(), -1);
    for (const Link& link : net.links_) {
        int to_inter = node_intersection[static_cast<std::size_t>(link.to)];
        int from_inter = node_intersection[static_cast<std::size_t>(link.from)];
        auto axis = static_cast<std::size_t>(link.axis);
        if (to_inter >= 0) {
            net.link_intersection_[static_cast<std::size_t>(link.id)] = to_inter;
            net.intersections_[static_cast<std::size_t>(to_inter)].incoming[axis] = link.id;
        }
        if (from_inter >= 0) {
            net.intersections_[static_cast<std::size_t>(from_inter)].outgoing[axis] = link.id;
        }
    }

    for (Intersection& inter : net.intersections_) {
        for (int p = 0; p < 2; ++p) {
            Phase& phase = inter.phases[static_cast<std::size_t>(p)];
            phase.index = p;
            phase.served_axis = static_cast<Axis>(p);
            int in = inter.incoming[static_cast<std::size_t>(p)];
            for (int lane = 0; lane < lanes; ++lane) {
                phase.movements.push_back(Movement{in, lane});
            }
        }
    }
    return net;
}

int lane_capacity(const Link& link, double vehicle_length, double min_gap) {
    return static_cast<int>(std::floor(link.length / (vehicle_length + min_gap)));
}

int phase_capacity(const GridNetwork& net, const Phase& phase, double vehicle_length, double min_gap) {
    int total = 0;
    for (const Movement& m : phase.movements) {
        total += lane_capacity(net.link(m.link), vehicle_length, min_gap);
    }
    return total;
}

}  // namespace gridsig
