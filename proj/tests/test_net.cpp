#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "gridsig/net.hpp"

using namespace gridsig;

namespace {

// Counts links by walking every row and column corridor boundary to boundary.
int enumerate_links(int rows, int cols) {
    int n = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c <= cols; ++c) {
            ++n;
        }
    }
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r <= rows; ++r) {
            ++n;
        }
    }
    return n;
}

}  // namespace

TEST_SUITE("net") {

TEST_CASE("default grid has 16 intersections and 8 routes") {
    GridNetwork net = build_grid(4, 4, 150, 2);
    CHECK(net.intersections().size() == 16);
    CHECK(net.routes().size() == 8);
    std::set<std::string> names;
    for (const Route& r : net.routes()) {
        names.insert(r.name);
    }
    for (const char* name : {"A2F2", "A3F3", "A4F4", "A5F5", "B1B6", "C1C6", "D1D6", "E1E6"}) {
        CHECK(names.count(name) == 1);
    }
    for (const Link& l : net.links()) {
        CHECK(l.length == 150.0);
        CHECK(l.lanes == 2);
    }
}

TEST_CASE("minimal grid") {
    GridNetwork net = build_grid(1, 1, 150, 2);
    CHECK(net.intersections().size() == 1);
    CHECK(net.routes().size() == 2);
    CHECK(net.links().size() == 4);
}

TEST_CASE("rectangular grid route lengths follow the opposite dimension") {
    GridNetwork net = build_grid(2, 3, 100, 1);
    CHECK(net.intersections().size() == 6);
    REQUIRE(net.routes().size() == 5);
    for (const Route& r : net.routes()) {
        std::size_t expected = r.axis == Axis::WE ? 3 + 1 : 2 + 1;
        CHECK(r.links.size() == expected);
    }
}

TEST_CASE("link count matches enumeration") {
    for (int rows = 1; rows <= 4; ++rows) {
        for (int cols = 1; cols <= 4; ++cols) {
            GridNetwork net = build_grid(rows, cols, 150, 2);
            CAPTURE(rows);
            CAPTURE(cols);
            CHECK(static_cast<int>(net.links().size()) == enumerate_links(rows, cols));
            CHECK(static_cast<int>(net.links().size()) == rows * (cols + 1) + cols * (rows + 1));
        }
    }
}

TEST_CASE("invalid dimensions are rejected") {
    CHECK_THROWS_AS(build_grid(0, 4, 150, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(4, 0, 150, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(4, 4, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(4, 4, 150, 0), std::invalid_argument);
}

TEST_CASE("structural invariants") {
    for (int rows = 1; rows <= 4; ++rows) {
        for (int cols = 1; cols <= 4; ++cols) {
            GridNetwork net = build_grid(rows, cols, 150, 2);
            std::set<std::string> labels;
            int signalized = 0;
            for (const Node& n : net.nodes()) {
                labels.insert(n.id.label);
                signalized += n.signalized ? 1 : 0;
                bool interior = n.id.row >= 1 && n.id.row <= rows && n.id.col >= 1 && n.id.col <= cols;
                CHECK(n.signalized == interior);
            }
            CHECK(labels.size() == net.nodes().size());
            CHECK(signalized == rows * cols);

            // One-way: no link has a reverse twin.
            std::set<std::pair<int, int>> arcs;
            for (const Link& l : net.links()) {
                arcs.insert({l.from, l.to});
            }
            for (const Link& l : net.links()) {
                CHECK(arcs.count({l.to, l.from}) == 0);
            }

            for (const Intersection& inter : net.intersections()) {
                for (int axis = 0; axis < 2; ++axis) {
                    int in = inter.incoming[static_cast<std::size_t>(axis)];
                    int out = inter.outgoing[static_cast<std::size_t>(axis)];
                    CHECK(net.link(in).to == inter.node);
                    CHECK(net.link(out).from == inter.node);
                    CHECK(static_cast<int>(net.link(in).axis) == axis);
                    CHECK(net.next_link(in) == out);
                }
                // Exactly one incoming and one outgoing link per axis.
                int n_in = 0;
                int n_out = 0;
                for (const Link& l : net.links()) {
                    n_in += l.to == inter.node ? 1 : 0;
                    n_out += l.from == inter.node ? 1 : 0;
                }
                CHECK(n_in == 2);
                CHECK(n_out == 2);

                REQUIRE(inter.phases.size() == 2);
                CHECK(inter.phases[0].served_axis == Axis::NS);
                CHECK(inter.phases[1].served_axis == Axis::WE);
                for (const Movement& a : inter.phases[0].movements) {
                    for (const Movement& b : inter.phases[1].movements) {
                        CHECK_FALSE(a == b);
                    }
                }
            }

            for (std::size_t r = 0; r < net.routes().size(); ++r) {
                const Route& route = net.routes()[r];
                std::set<int> seen(route.links.begin(), route.links.end());
                CHECK(seen.size() == route.links.size());
                CHECK(net.link(route.links.front()).from == route.origin);
                CHECK(net.link(route.links.back()).to == route.destination);
                for (std::size_t i = 0; i < route.links.size(); ++i) {
                    const Link& l = net.link(route.links[i]);
                    CHECK(l.axis == route.axis);
                    CHECK(l.route == static_cast<int>(r));
                    CHECK(l.route_index == static_cast<int>(i));
                    if (i + 1 < route.links.size()) {
                        CHECK(l.to == net.link(route.links[i + 1]).from);
                    }
                    const Node& from = net.nodes()[static_cast<std::size_t>(l.from)];
                    const Node& to = net.nodes()[static_cast<std::size_t>(l.to)];
                    if (route.axis == Axis::WE) {
                        CHECK(from.id.row == to.id.row);
                        CHECK(to.id.col == from.id.col + 1);
                    } else {
                        CHECK(from.id.col == to.id.col);
                        CHECK(to.id.row == from.id.row + 1);
                    }
                }
                CHECK(net.next_link(route.links.back()) == -1);
                CHECK(net.controlling_intersection(route.links.back()) == -1);
            }
        }
    }
}

TEST_CASE("lane and phase capacity") {
    GridNetwork net = build_grid(4, 4, 150, 2);
    CHECK(lane_capacity(net.links().front()) == 20);
    for (const Intersection& inter : net.intersections()) {
        CHECK(phase_capacity(net, inter.phases[0]) == 40);
        CHECK(phase_capacity(net, inter.phases[1]) == 40);
    }
    Link short_link;
    short_link.length = 7.5;
    CHECK(lane_capacity(short_link) == 1);
    short_link.length = 7.4;
    CHECK(lane_capacity(short_link) == 0);
}

TEST_CASE("column letters") {
    CHECK(column_letters(0) == "A");
    CHECK(column_letters(5) == "F");
    CHECK(column_letters(25) == "Z");
    CHECK(column_letters(26) == "AA");
    CHECK_THROWS(column_letters(-1));
}

TEST_CASE("lookup by label") {
    GridNetwork net = build_grid(4, 4, 150, 2);
    int b2 = net.find_node("B2");
    REQUIRE(b2 >= 0);
    CHECK(net.nodes()[static_cast<std::size_t>(b2)].signalized);
    CHECK(net.find_node("A1") == -1);  // corner
    CHECK(net.find_route("A2F2") >= 0);
    CHECK(net.find_route("F2A2") == -1);
}

}  // TEST_SUITE
