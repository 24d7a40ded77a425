#include "jbt/geom.hpp"

namespace jbt::geom {

namespace {
constexpr int kTagBits = 62;
constexpr double kDensity = 1.3;  // overflow threshold base
}  // namespace

OrderList::OrderList() : tag_{0}, next_{kNone}, prev_{kNone} {}

OrderList::Item OrderList::insert_after(Item a) {
  const std::uint64_t limit = std::uint64_t(1) << kTagBits;
  auto gap = [&] { return (next_[a] == kNone ? limit : tag_[next_[a]]) - tag_[a]; };
  if (gap() < 2) relabel(a);
  std::uint64_t hi = next_[a] == kNone ? limit : tag_[next_[a]];
  Item v = Item(tag_.size());
  tag_.push_back(tag_[a] + (hi - tag_[a]) / 2);
  next_.push_back(next_[a]);
  prev_.push_back(a);
  if (next_[a] != kNone) prev_[next_[a]] = v;
  next_[a] = v;
  return v;
}

OrderList::Item OrderList::insert_before(Item a) {
  if (a == kHead) throw std::invalid_argument("OrderList: nothing precedes the head");
  return insert_after(prev_[a]);
}

// Spreads the items around a over the smallest aligned tag range whose
// density is below kDensity^-i, leaving room after a.
void OrderList::relabel(Item a) {
  ++relabels_;
  for (int i = 1; i <= kTagBits; ++i) {
    std::uint64_t width = std::uint64_t(1) << i;
    std::uint64_t lo = tag_[a] & ~(width - 1), hi = lo + width;  // [lo, hi)
    Item first = a, last = a;
    std::uint64_t count = 1;
    while (prev_[first] != kNone && tag_[prev_[first]] >= lo) {
      first = prev_[first];
      ++count;
    }
    while (next_[last] != kNone && tag_[next_[last]] < hi) {
      last = next_[last];
      ++count;
    }
    double cap = double(width) / std::pow(kDensity, i);
    if (double(count + 1) > cap && i < kTagBits) continue;
    std::uint64_t step = width / (count + 1);
    if (step < 2) continue;
    std::uint64_t t = lo;
    for (Item v = first;; v = next_[v]) {
      tag_[v] = t;
      t += step;
      if (v == last) break;
    }
    return;
  }
  throw std::length_error("OrderList: tag space exhausted");
}

void DynamicPointSet::insert(Item x, Item y, std::uint64_t payload) {
  buffer_.push_back({x, y, payload});
  ++size_;
  if (buffer_.size() < kBuffer) return;
  std::vector<Point> carry = std::move(buffer_);
  buffer_.clear();
  std::size_t j = 0;
  for (; j < slots_.size() && slots_[j]; ++j) {
    const auto& pts = slots_[j]->points();
    carry.insert(carry.end(), pts.begin(), pts.end());
    slots_[j].reset();
  }
  if (j == slots_.size()) slots_.emplace_back();
  slots_[j].emplace(std::move(carry), lx_, ly_);
}

std::vector<DynamicPointSet::Point> DynamicPointSet::report(Item x1, Item x2, Item y1, Item y2) const {
  std::vector<Point> out;
  for (const auto& p : buffer_)
    if (in(p, x1, x2, y1, y2)) out.push_back(p);
  for (const auto& s : slots_)
    if (s) s->report(x1, x2, y1, y2, [&](const Point& p) {
        out.push_back(p);
        return true;
      });
  return out;
}

bool DynamicPointSet::any(Item x1, Item x2, Item y1, Item y2) const {
  for (const auto& p : buffer_)
    if (in(p, x1, x2, y1, y2)) return true;
  for (const auto& s : slots_)
    if (s && s->any(x1, x2, y1, y2)) return true;
  return false;
}

std::optional<std::uint64_t> DynamicPointSet::min_payload(Item x1, Item x2, Item y1, Item y2) const {
  std::optional<std::uint64_t> best;
  auto take = [&](std::optional<std::uint64_t> v) {
    if (v && (!best || *v < *best)) best = v;
  };
  for (const auto& p : buffer_)
    if (in(p, x1, x2, y1, y2)) take(p.payload);
  for (const auto& s : slots_)
    if (s) take(s->min_payload(x1, x2, y1, y2));
  return best;
}

std::optional<std::uint64_t> DynamicPointSet::min_payload_x(Item x1, Item x2) const {
  std::optional<std::uint64_t> best;
  auto take = [&](std::optional<std::uint64_t> v) {
    if (v && (!best || *v < *best)) best = v;
  };
  for (const auto& p : buffer_)
    if (!lx_(p.x, x1) && !lx_(x2, p.x)) take(p.payload);
  for (const auto& s : slots_)
    if (s) take(s->min_payload_x(x1, x2));
  return best;
}

}  // namespace jbt::geom
