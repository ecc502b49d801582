#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cccnet/tree.hpp"
#include "cccnet/rng.hpp"

using namespace cccnet;

namespace {

PeerNode make_peer(PeerId id, VertexLabel l) {
  PeerNode p;
  p.id = id;
  p.node_id = l;
  return p;
}

// `per_label` coverers on every template vertex.
OverlayState covered_overlay(int dim, int per_label, PeerId* next_id) {
  OverlayState ov(TemplateParams::for_dim(dim));
  for (int c = 0; c < per_label; ++c)
    for (uint32_t i = 0; i < label_space(dim); ++i)
      ov.register_peer(make_peer((*next_id)++, label_at(dim, i)));
  return ov;
}

}  // namespace

TEST_CASE("build requires uniform dimension and full coverage") {
  PeerId next = 1;
  OverlayState ov(TemplateParams::for_dim(3));
  SpanningTree tree;
  CHECK(!tree.can_build(ov));
  for (uint32_t i = 0; i + 1 < label_space(3); ++i)
    ov.register_peer(make_peer(next++, label_at(3, i)));
  CHECK(!tree.can_build(ov));  // one vertex still uncovered
  ov.register_peer(make_peer(next++, label_at(3, label_space(3) - 1)));
  CHECK(tree.can_build(ov));
  CHECK(tree.try_build(ov));
  CHECK(tree.built());
  CHECK(tree.builds() == 1);
  CHECK(tree.rebuilds() == 0);

  const auto check = tree.validate(ov);
  CHECK(check.ok());
  CHECK(check.diameter <= 2 * ccc_diameter(3) + 2);
}

TEST_CASE("non-leader insert costs one message") {
  PeerId next = 1;
  auto ov = covered_overlay(3, 2, &next);
  SpanningTree tree;
  REQUIRE(tree.try_build(ov));
  const uint64_t before = tree.repair_messages();

  const PeerNode cand = make_peer(next++, label_at(3, 7));
  REQUIRE(ov.try_join(cand, ov.live().front()).ok);
  const auto rep = tree.on_insert(ov, cand.id);
  CHECK(rep.applied);
  CHECK(rep.messages == 1);
  CHECK(tree.repair_messages() == before + 1);
  CHECK(tree.validate(ov).ok());
}

TEST_CASE("non-leader departure costs nothing") {
  PeerId next = 1;
  auto ov = covered_overlay(3, 2, &next);
  SpanningTree tree;
  REQUIRE(tree.try_build(ov));
  Rng rng(1);

  // Leaders are the lowest ids; the second coverer of label 0 is not one.
  const PeerId follower = ov.coverers(label_at(3, 0)).back();
  CHECK(!ov.peer(follower).is_leader);
  const PeerNode copy = ov.peer(follower);
  ov.leave(follower, rng);
  const auto rep = tree.on_delete(ov, copy);
  CHECK(rep.applied);
  CHECK(rep.messages == 0);
  CHECK(tree.validate(ov).ok());
}

TEST_CASE("leader departure promotes within the clique") {
  PeerId next = 1;
  auto ov = covered_overlay(4, 3, &next);
  SpanningTree tree;
  REQUIRE(tree.try_build(ov));
  Rng rng(2);

  const VertexLabel l = label_at(4, 20);
  const PeerId leader = ov.coverers(l).front();
  CHECK(ov.peer(leader).is_leader);
  const PeerNode copy = ov.peer(leader);
  ov.leave(leader, rng);
  const auto rep = tree.on_delete(ov, copy);
  CHECK(rep.applied);
  CHECK(rep.messages >= static_cast<int>(ov.coverers(l).size()));
  CHECK(ov.peer(ov.coverers(l).front()).is_leader);
  CHECK(tree.validate(ov).ok());
}

TEST_CASE("root departure hands the root over") {
  PeerId next = 1;
  auto ov = covered_overlay(3, 2, &next);
  SpanningTree tree;
  REQUIRE(tree.try_build(ov));
  Rng rng(3);

  const PeerId root = ov.coverers(label_at(3, 0)).front();
  const PeerNode copy = ov.peer(root);
  ov.leave(root, rng);
  const auto rep = tree.on_delete(ov, copy);
  CHECK(rep.applied);
  CHECK(tree.validate(ov).ok());
}

TEST_CASE("emptying a clique forces a rebuild") {
  PeerId next = 1;
  auto ov = covered_overlay(3, 1, &next);
  SpanningTree tree;
  REQUIRE(tree.try_build(ov));
  Rng rng(4);

  const PeerId solo = ov.coverers(label_at(3, 11)).front();
  const PeerNode copy = ov.peer(solo);
  ov.leave(solo, rng);
  const auto rep = tree.on_delete(ov, copy);
  CHECK(!rep.applied);
  CHECK(rep.rebuild_needed);
  CHECK(!tree.built());
  CHECK(!tree.can_build(ov));

  // Refill the hole; the tree can come back and counts one rebuild.
  ov.register_peer(make_peer(next++, label_at(3, 11)));
  CHECK(tree.can_build(ov));
  CHECK(tree.try_build(ov));
  CHECK(tree.rebuilds() == 1);
  CHECK(tree.validate(ov).ok());
}

TEST_CASE("insert into an empty label re-wires the leader") {
  PeerId next = 1;
  auto ov = covered_overlay(3, 2, &next);
  SpanningTree tree;
  REQUIRE(tree.try_build(ov));
  Rng rng(5);

  // Drain one clique (two non-hole deletions then the rebuild-triggering one
  // would break the tree, so drain a non-root label's followers first).
  const VertexLabel l = label_at(3, 15);
  while (ov.coverers(l).size() > 1) {
    const PeerId id = ov.coverers(l).back();
    const PeerNode copy = ov.peer(id);
    ov.leave(id, rng);
    tree.on_delete(ov, copy);
  }
  CHECK(tree.validate(ov).ok());

  // A fresh peer lands there; one insert keeps the tree valid.
  const PeerNode cand = make_peer(next++, l);
  REQUIRE(ov.try_join(cand, ov.live().front()).ok);
  const auto rep = tree.on_insert(ov, cand.id);
  CHECK(rep.applied);
  CHECK(tree.validate(ov).ok());
}

TEST_CASE("randomized churn keeps the tree valid at checkpoints") {
  PeerId next = 1;
  auto ov = covered_overlay(4, 3, &next);
  SpanningTree tree;
  REQUIRE(tree.try_build(ov));
  Rng rng(6);

  for (int t = 1; t <= 3000; ++t) {
    if (rng.coin()) {
      const PeerNode cand = make_peer(next++, random_label(4, rng));
      if (ov.try_join(cand, ov.random_live(rng)).ok) tree.on_insert(ov, cand.id);
    } else if (ov.size() > 1) {
      const PeerId id = ov.random_live(rng);
      const PeerNode copy = ov.peer(id);
      ov.leave(id, rng);
      tree.on_delete(ov, copy);
    }
    if (!tree.built() && tree.can_build(ov)) tree.try_build(ov);
    if (t % 250 == 0 && tree.built()) {
      const auto check = tree.validate(ov);
      CHECK(check.ok());
      CHECK(check.diameter <= 2 * ccc_diameter(4) + 2);
    }
  }
}
