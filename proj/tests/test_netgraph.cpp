#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "copter/csv.hpp"
#include "copter/netgraph.hpp"
#include "oracles.hpp"

using namespace copter;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("copter_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

TransportGraph minimal_graph() {
  std::vector<Node> nodes = {{"a", 34.0, -118.0}, {"b", 34.001, -118.0}};
  std::vector<Edge> edges;
  Edge e;
  e.id = "e1";
  e.from = "a";
  e.to = "b";
  e.mode = Mode::Walk;
  e.length_m = 100;
  e.traversal = FixedSpeed{1.4};
  edges.push_back(e);
  return TransportGraph::build(nodes, edges, {});
}

}  // namespace

TEST_SUITE("netgraph") {

TEST_CASE("load minimal two-node walk graph") {
  const fs::path dir = temp_dir("load_min");
  write_file(dir / "nodes.csv", "id,lat,lon\na,34.0,-118.0\nb,34.001,-118.0\n");
  write_file(dir / "edges.csv",
             "id,from,to,mode,length_m,speed_mps,schedule_id\n"
             "e1,a,b,w,100,1.4,\n");
  write_file(dir / "schedules.csv", "schedule_id,ride_time_s,departures\n");

  const TransportGraph g = load_graph(dir);
  CHECK(g.nodes().size() == 2);
  CHECK(g.edges().size() == 1);
  CHECK(g.out_edges(g.node_index("a")).size() == 1);
  CHECK(g.out_edges(g.node_index("b")).empty());
}

TEST_CASE("edge referencing a missing node is a dangling reference") {
  const fs::path dir = temp_dir("dangling");
  write_file(dir / "nodes.csv", "id,lat,lon\na,34.0,-118.0\n");
  write_file(dir / "edges.csv",
             "id,from,to,mode,length_m,speed_mps,schedule_id\n"
             "e1,a,X,w,100,1.4,\n");
  write_file(dir / "schedules.csv", "schedule_id,ride_time_s,departures\n");
  CHECK_THROWS_AS(load_graph(dir), DanglingReference);
}

TEST_CASE("non-increasing schedule departures violate invariants") {
  const fs::path dir = temp_dir("sched_order");
  write_file(dir / "nodes.csv", "id,lat,lon\na,34.0,-118.0\nb,34.001,-118.0\n");
  write_file(dir / "edges.csv",
             "id,from,to,mode,length_m,speed_mps,schedule_id\n"
             "e1,a,b,b,100,,s1\n");
  write_file(dir / "schedules.csv",
             "schedule_id,ride_time_s,departures\ns1,300,300;200\n");
  CHECK_THROWS_AS(load_graph(dir), InvariantViolation);
}

TEST_CASE("walk and cycle edges default their speeds when omitted") {
  const fs::path dir = temp_dir("def_speed");
  write_file(dir / "nodes.csv", "id,lat,lon\na,34.0,-118.0\nb,34.001,-118.0\n");
  write_file(dir / "edges.csv",
             "id,from,to,mode,length_m,speed_mps,schedule_id\n"
             "e1,a,b,w,140,,\n"
             "e2,a,b,c,140,,\n");
  write_file(dir / "schedules.csv", "schedule_id,ride_time_s,departures\n");
  const TransportGraph g = load_graph(dir);
  CHECK(g.edge(0).fixed_speed() == doctest::Approx(1.4));
  CHECK(g.edge(1).fixed_speed() == doctest::Approx(4.0));
}

TEST_CASE("a drive edge with neither speed nor schedule fails to parse") {
  const fs::path dir = temp_dir("no_speed");
  write_file(dir / "nodes.csv", "id,lat,lon\na,34.0,-118.0\nb,34.001,-118.0\n");
  write_file(dir / "edges.csv",
             "id,from,to,mode,length_m,speed_mps,schedule_id\n"
             "e1,a,b,d,140,,\n");
  write_file(dir / "schedules.csv", "schedule_id,ride_time_s,departures\n");
  CHECK_THROWS_AS(load_graph(dir), ParseError);
}

TEST_CASE("scheduled traversal is only valid for transit modes") {
  std::vector<Node> nodes = {{"a", 0, 0}, {"b", 0.001, 0}};
  Edge e;
  e.id = "e1";
  e.from = "a";
  e.to = "b";
  e.mode = Mode::Drive;
  e.length_m = 100;
  e.traversal = ScheduledRef{"s1"};
  Schedule s{"s1", {600}, 300};
  CHECK_THROWS_AS(TransportGraph::build(nodes, {e}, {s}), InvariantViolation);
}

TEST_CASE("fixed-speed duration is length over speed") {
  const TransportGraph g = minimal_graph();
  Edge e = g.edge(0);
  e.length_m = 140;
  CHECK(duration(g, e, 0) == doctest::Approx(100.0));
  CHECK(duration(g, e, 86000) == doctest::Approx(100.0));
}

TEST_CASE("scheduled duration includes the wait for the next departure") {
  std::vector<Node> nodes = {{"a", 0, 0}, {"b", 0.001, 0}};
  Edge e;
  e.id = "e1";
  e.from = "a";
  e.to = "b";
  e.mode = Mode::Bus;
  e.length_m = 1000;
  e.traversal = ScheduledRef{"s1"};
  const Schedule s{"s1", {600}, 300};
  const TransportGraph g = TransportGraph::build(nodes, {e}, {s});

  CHECK(duration(g, g.edge(0), 500) == doctest::Approx(400.0));
  CHECK(duration(g, g.edge(0), 600) == doctest::Approx(300.0));
  CHECK_THROWS_AS(duration(g, g.edge(0), 700), NoService);
  CHECK_FALSE(try_duration(g, g.edge(0), 700).has_value());
}

TEST_CASE("duration is positive and scheduled edges satisfy FIFO") {
  Rng rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    const TransportGraph g = testing::random_graph(rng);
    for (const Edge& e : g.edges()) {
      for (int probe = 0; probe < 20; ++probe) {
        const double t1 = static_cast<double>(rng.uniform_int(0, 9000));
        const double t2 = t1 + static_cast<double>(rng.uniform_int(0, 3000));
        const auto d1 = try_duration(g, e, t1);
        const auto d2 = try_duration(g, e, t2);
        if (d1) CHECK(*d1 > 0);
        if (d1 && d2) CHECK(t1 + *d1 <= t2 + *d2);
        // Service never resumes after it has ended.
        if (!d1) CHECK_FALSE(d2.has_value());
      }
    }
  }
}

TEST_CASE("graph save/load round-trips to an identical graph") {
  Rng rng(7);
  const fs::path dir = temp_dir("roundtrip");
  for (int trial = 0; trial < 25; ++trial) {
    const TransportGraph g = testing::random_graph(rng);
    save_graph(g, dir);
    const TransportGraph back = load_graph(dir);
    CHECK(back == g);
  }
}

TEST_CASE("query validation") {
  const TransportGraph g = minimal_graph();
  CHECK_THROWS_AS(validate_query(g, {"a", "b", 100, 100}), InvariantViolation);
  CHECK_THROWS_AS(validate_query(g, {"a", "zzz", 0, 100}), DanglingReference);
  CHECK_NOTHROW(validate_query(g, {"a", "b", 0, 100}));
}

}  // TEST_SUITE
