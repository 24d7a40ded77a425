#pragma once

#include <bit>
#include <cmath>
#include <optional>

#include "jbt/common.hpp"

namespace jbt::geom {

// Static 2D orthogonal range structure (merge-sort tree over x with y-sorted
// levels and block minima for payload range-min).  Coordinates are opaque
// values ordered by the supplied comparators; queries are inclusive.
template <class Coord = std::uint64_t, class LessX = std::less<Coord>, class LessY = std::less<Coord>>
class RangeTree {
 public:
  struct Point {
    Coord x{};
    Coord y{};
    std::uint64_t payload = 0;
  };

  RangeTree() = default;
  explicit RangeTree(std::vector<Point> pts, LessX lx = LessX(), LessY ly = LessY())
      : pts_(std::move(pts)), lx_(lx), ly_(ly) {
    build();
  }

  std::size_t size() const { return pts_.size(); }
  const std::vector<Point>& points() const { return pts_; }

  // Calls f(point) for every point in [x1,x2] x [y1,y2]; stops early if f returns false.
  template <class F>
  bool report(const Coord& x1, const Coord& x2, const Coord& y1, const Coord& y2, F&& f) const {
    bool go = true;
    for_segments(x1, x2, y1, y2, [&](int d, std::size_t a, std::size_t b) {
      for (std::size_t k = a; k < b && go; ++k) go = f(pts_[lvl_[d][k]]);
      return go;
    });
    return go;
  }

  bool any(const Coord& x1, const Coord& x2, const Coord& y1, const Coord& y2) const {
    bool found = false;
    for_segments(x1, x2, y1, y2, [&](int, std::size_t a, std::size_t b) {
      found = a < b;
      return !found;
    });
    return found;
  }

  std::optional<std::uint64_t> min_payload(const Coord& x1, const Coord& x2, const Coord& y1,
                                           const Coord& y2) const {
    std::optional<std::uint64_t> best;
    for_segments(x1, x2, y1, y2, [&](int d, std::size_t a, std::size_t b) {
      if (a < b) {
        std::uint64_t v = range_min(d, a, b);
        if (!best || v < *best) best = v;
      }
      return true;
    });
    return best;
  }

  // Minimum payload over x in [x1,x2] with y unrestricted.
  std::optional<std::uint64_t> min_payload_x(const Coord& x1, const Coord& x2) const {
    auto [l, r] = x_bounds(x1, x2);
    if (l >= r) return std::nullopt;
    return range_min(0, l, r);
  }

 private:
  static constexpr std::size_t kBlock = 32;

  void build() {
    std::stable_sort(pts_.begin(), pts_.end(), [&](const Point& a, const Point& b) { return lx_(a.x, b.x); });
    const std::size_t n = pts_.size();
    levels_ = n <= 1 ? 1 : int(std::bit_width(n - 1)) + 1;
    lvl_.assign(levels_, {});
    lvl_[0].resize(n);
    for (std::size_t i = 0; i < n; ++i) lvl_[0][i] = std::uint32_t(i);
    auto yless = [&](std::uint32_t a, std::uint32_t b) { return ly_(pts_[a].y, pts_[b].y); };
    for (int d = 1; d < levels_; ++d) {
      const auto& src = lvl_[d - 1];
      auto& dst = lvl_[d];
      dst.resize(n);
      const std::size_t half = std::size_t(1) << (d - 1), seg = half << 1;
      for (std::size_t s = 0; s < n; s += seg) {
        std::size_t m = std::min(n, s + half), e = std::min(n, s + seg);
        std::merge(src.begin() + s, src.begin() + m, src.begin() + m, src.begin() + e, dst.begin() + s, yless);
      }
    }
    // Sparse tables over per-block minima of each level.
    sparse_.assign(levels_, {});
    const std::size_t nb = (n + kBlock - 1) / kBlock;
    for (int d = 0; d < levels_; ++d) {
      auto& sp = sparse_[d];
      sp.emplace_back(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        std::uint64_t v = ~std::uint64_t(0);
        for (std::size_t k = b * kBlock; k < std::min(n, (b + 1) * kBlock); ++k) v = std::min(v, pts_[lvl_[d][k]].payload);
        sp[0][b] = v;
      }
      for (std::size_t j = 1; (std::size_t(1) << j) <= nb; ++j) {
        std::vector<std::uint64_t> row(nb - (std::size_t(1) << j) + 1);
        for (std::size_t b = 0; b < row.size(); ++b)
          row[b] = std::min(sp[j - 1][b], sp[j - 1][b + (std::size_t(1) << (j - 1))]);
        sp.push_back(std::move(row));
      }
    }
  }

  std::uint64_t range_min(int d, std::size_t a, std::size_t b) const {
    std::uint64_t v = ~std::uint64_t(0);
    std::size_t ba = (a + kBlock - 1) / kBlock, bb = b / kBlock;
    if (ba >= bb) {
      for (std::size_t k = a; k < b; ++k) v = std::min(v, pts_[lvl_[d][k]].payload);
      return v;
    }
    for (std::size_t k = a; k < ba * kBlock; ++k) v = std::min(v, pts_[lvl_[d][k]].payload);
    for (std::size_t k = bb * kBlock; k < b; ++k) v = std::min(v, pts_[lvl_[d][k]].payload);
    std::size_t j = std::bit_width(bb - ba) - 1;
    const auto& sp = sparse_[d];
    return std::min({v, sp[j][ba], sp[j][bb - (std::size_t(1) << j)]});
  }

  std::pair<std::size_t, std::size_t> x_bounds(const Coord& x1, const Coord& x2) const {
    auto l = std::lower_bound(pts_.begin(), pts_.end(), x1, [&](const Point& p, const Coord& c) { return lx_(p.x, c); });
    auto r = std::upper_bound(pts_.begin(), pts_.end(), x2, [&](const Coord& c, const Point& p) { return lx_(c, p.x); });
    return {std::size_t(l - pts_.begin()), std::size_t(std::max(l, r) - pts_.begin())};
  }

  // Decomposes the x-range into canonical segments and passes each segment's
  // y-range bounds to g(level, a, b); g returns false to stop.
  template <class G>
  void for_segments(const Coord& x1, const Coord& x2, const Coord& y1, const Coord& y2, G&& g) const {
    if (pts_.empty() || ly_(y2, y1)) return;
    auto [l, r] = x_bounds(x1, x2);
    while (l < r) {
      int d = 0;
      while (d + 1 < levels_ && l % (std::size_t(1) << (d + 1)) == 0 && l + (std::size_t(1) << (d + 1)) <= r) ++d;
      std::size_t len = std::size_t(1) << d;
      const auto& arr = lvl_[d];
      auto first = arr.begin() + l, last = arr.begin() + l + len;
      auto a = std::lower_bound(first, last, y1, [&](std::uint32_t i, const Coord& c) { return ly_(pts_[i].y, c); });
      auto b = std::upper_bound(a, last, y2, [&](const Coord& c, std::uint32_t i) { return ly_(c, pts_[i].y); });
      if (!g(d, std::size_t(a - arr.begin()), std::size_t(b - arr.begin()))) return;
      l += len;
    }
  }

  std::vector<Point> pts_;
  LessX lx_;
  LessY ly_;
  int levels_ = 0;
  std::vector<std::vector<std::uint32_t>> lvl_;
  std::vector<std::vector<std::vector<std::uint64_t>>> sparse_;
};

// Order-maintenance list: items carry integer tags consistent with list
// order; dense spots are relabeled over the smallest sparse enclosing range.
class OrderList {
 public:
  using Item = std::uint32_t;
  static constexpr Item kHead = 0;

  OrderList();
  Item insert_after(Item a);
  Item insert_before(Item a);
  bool less(Item a, Item b) const { return tag_[a] < tag_[b]; }
  int compare(Item a, Item b) const { return tag_[a] < tag_[b] ? -1 : tag_[a] > tag_[b] ? 1 : 0; }
  std::uint64_t tag(Item a) const { return tag_[a]; }
  Item next(Item a) const { return next_[a]; }
  Item prev(Item a) const { return prev_[a]; }
  std::size_t size() const { return tag_.size(); }
  std::uint64_t relabels() const { return relabels_; }

  struct Less {
    const OrderList* list = nullptr;
    bool operator()(Item a, Item b) const { return list->less(a, b); }
  };

 private:
  static constexpr Item kNone = ~Item(0);
  void relabel(Item a);

  std::vector<std::uint64_t> tag_;
  std::vector<Item> next_, prev_;
  std::uint64_t relabels_ = 0;
};

// Dynamic point set over OrderList items (binary-counter collection of
// static range trees plus a small unsorted buffer).
class DynamicPointSet {
 public:
  using Item = OrderList::Item;
  using Tree = RangeTree<Item, OrderList::Less, OrderList::Less>;
  using Point = Tree::Point;

  DynamicPointSet(const OrderList& xs, const OrderList& ys) : lx_{&xs}, ly_{&ys} {}

  void insert(Item x, Item y, std::uint64_t payload);
  std::size_t size() const { return size_; }

  std::vector<Point> report(Item x1, Item x2, Item y1, Item y2) const;
  bool any(Item x1, Item x2, Item y1, Item y2) const;
  std::optional<std::uint64_t> min_payload(Item x1, Item x2, Item y1, Item y2) const;
  std::optional<std::uint64_t> min_payload_x(Item x1, Item x2) const;

 private:
  static constexpr std::size_t kBuffer = 64;
  bool in(const Point& p, Item x1, Item x2, Item y1, Item y2) const {
    return !lx_(p.x, x1) && !lx_(x2, p.x) && !ly_(p.y, y1) && !ly_(y2, p.y);
  }

  OrderList::Less lx_, ly_;
  std::vector<Point> buffer_;
  std::vector<std::optional<Tree>> slots_;
  std::size_t size_ = 0;
};

}  // namespace jbt::geom
