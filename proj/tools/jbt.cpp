// Command-line front end: build, search, stats, verify and delta.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "jbt/builder.hpp"
#include "jbt/checks.hpp"
#include "jbt/oracle.hpp"
#include "jbt/search.hpp"
#include "jbt/serialize.hpp"
#include "json.hpp"

using namespace jbt;
using nlohmann::json;

namespace {

std::string read_all(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Bytes become letters 0..255; token mode reads whitespace-separated
// unsigned integers below 2^32.
std::vector<Id> parse_symbols(const std::string& data, bool tokens) {
  std::vector<Id> out;
  if (!tokens) {
    out.reserve(data.size());
    for (unsigned char c : data) out.push_back(c);
    return out;
  }
  std::istringstream in(data);
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok[0] == '-' || v >= kLetterLimit) throw std::runtime_error("bad token: " + tok);
    out.push_back(v);
  }
  return out;
}

json stats_json(const builder::BuildStats& st, Pos n, double seconds, std::size_t fileBytes) {
  return json{{"n", n},
              {"seconds", seconds},
              {"letters", st.letters},
              {"blocks_per_level", st.blocksPerLevel},
              {"peak_queue", st.peakQueue},
              {"j_nodes", st.jNodes},
              {"context_trie_nodes", st.ctxTrieNodes},
              {"points", st.points},
              {"order_relabels", st.orderRelabels},
              {"group_hits", st.groupHits},
              {"group_misses", st.groupMisses},
              {"index_bytes", fileBytes}};
}

int cmd_build(const std::string& input, const std::string& output, bool tokens, bool det, const std::string& statsPath,
              bool withDelta, std::size_t maxN) {
  auto text = parse_symbols(read_all(input), tokens);
  if (text.empty()) throw std::runtime_error("input is empty");
  auto t0 = std::chrono::steady_clock::now();
  builder::StreamBuilder b(det);
  for (Id c : text) b.feed_letter(c);
  auto I = b.finish();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string bytes = serialize::save(I);
  std::ofstream f(output, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + output);
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + output);
  json st = stats_json(b.stats(), I.n(), secs, bytes.size());
  if (withDelta) {
    if (text.size() > maxN) throw std::runtime_error("--delta needs n <= --max-n");
    auto d = oracle::delta(text).reduced();
    st["delta"] = d.str();
    double dv = double(d.num) / double(d.den);
    st["size_ratio"] = double(I.J.nodes.size()) / (dv * std::max(1.0, std::log2(double(text.size()) / dv)));
  }
  if (!statsPath.empty()) {
    std::ofstream s(statsPath);
    s << st.dump(2) << "\n";
  }
  std::cerr << "indexed " << I.n() << " symbols into " << I.J.nodes.size() << " nodes, " << bytes.size()
            << " bytes\n";
  return 0;
}

int cmd_search(const std::string& indexPath, const std::vector<std::string>& patterns, const std::string& patternFile,
               bool tokens, bool countOnly, bool asJson) {
  auto I = serialize::load_file(indexPath);
  std::vector<std::string> all = patterns;
  if (!patternFile.empty()) {
    std::istringstream in(read_all(patternFile));
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) all.push_back(line);
  }
  if (all.empty()) throw std::runtime_error("no patterns given");
  // One position per line; a batch prefixes each line with the pattern's
  // index in the batch.
  const bool batch = all.size() > 1;
  json out = json::array();
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto t = parse_symbols(all[i], tokens);
    if (t.empty()) throw std::runtime_error("empty pattern");
    auto occ = search::search(I, t);
    const std::string prefix = batch ? std::to_string(i) + "\t" : "";
    if (asJson) {
      json e{{"pattern", all[i]}, {"count", occ.size()}};
      if (!countOnly) e["positions"] = occ;
      out.push_back(std::move(e));
    } else if (countOnly) {
      std::cout << prefix << occ.size() << "\n";
    } else {
      for (Pos p : occ) std::cout << prefix << p << "\n";
    }
  }
  if (asJson) std::cout << out.dump() << "\n";
  return 0;
}

// Shape of a stored index.
int cmd_stats(const std::string& indexPath) {
  std::string bytes = read_all(indexPath);
  auto I = serialize::load(bytes);
  std::map<std::string, std::uint64_t> kinds;
  const char* names[] = {"letter", "run", "group", "copy", "intermediate"};
  for (const auto& x : I.J.nodes) ++kinds[names[int(x.kind)]];
  json out{{"n", I.n()},
           {"j_nodes", I.J.nodes.size()},
           {"node_kinds", kinds},
           {"group_trie_nodes", I.tid.size()},
           {"forward_trie_nodes", I.fwd.trie().size()},
           {"reverse_trie_nodes", I.rev.trie().size()},
           {"handles", I.fwd.handle_count() + I.rev.handle_count()},
           {"r_points", I.R.size()},
           {"pair_ids", I.pairDict.size()},
           {"deterministic", I.deterministic},
           {"index_bytes", bytes.size()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

void report(bool& ok, const std::string& suite, bool pass, const std::string& detail = "") {
  std::cout << (pass ? "PASS " : "FAIL ") << suite << (detail.empty() ? "" : " (" + detail + ")") << "\n";
  ok = ok && pass;
}

// Runs the invariant suites on a stored index and, if given, its text.
int cmd_verify(const std::string& indexPath, const std::string& textPath, bool tokens, int probes, std::uint64_t seed,
               std::size_t rebuildLimit) {
  std::string bytes = read_all(indexPath);
  auto I = serialize::load(bytes);
  bool ok = true;
  report(ok, "reserialize", serialize::save(I) == bytes);
  auto text = jiggly::expand_string(I.J, I.J.root);
  if (!textPath.empty()) report(ok, "expand_string", text == parse_symbols(read_all(textPath), tokens));

  auto h = hierarchy::build_hierarchy(text);
  auto tiles = checks::tiling_violations(h, text);
  report(ok, "runs tiling", tiles == 0, std::to_string(tiles) + " violations");
  std::mt19937_64 rng(seed);
  auto bc = checks::boundary_counts(h, rng, 1000);
  report(ok, "boundary counts", bc.violations == 0,
         std::to_string(bc.violations) + "/" + std::to_string(bc.windows) + " windows, max ratio " +
             std::to_string(bc.maxRatio));
  auto fp = checks::fingerprint_disagreements(I, text, rng, probes);
  report(ok, "fingerprint sampling", fp == 0, std::to_string(fp) + "/" + std::to_string(probes) + " disagreements");

  int bad = 0;
  for (int k = 0; k < probes; ++k) {
    std::size_t m = 1 + rng() % std::min<std::size_t>(text.size(), 32);
    std::size_t a = rng() % (text.size() - m + 1);
    std::vector<Id> t(text.begin() + a, text.begin() + a + m);
    if (k % 2) t[rng() % m] = text[rng() % text.size()];
    if (search::search(I, t) != oracle::naive_search(text, t)) ++bad;
  }
  report(ok, "search vs scan", bad == 0, std::to_string(probes - bad) + "/" + std::to_string(probes));

  if (text.size() <= rebuildLimit) {
    bool same = index::canonical_bytes(I) == index::canonical_bytes(index::build_offline(text));
    report(ok, "streaming equals offline", same);
  } else {
    std::cout << "SKIP streaming equals offline (n above --rebuild-limit)\n";
  }
  std::cout << (ok ? "verify ok" : "verify FAILED") << "\n";
  return ok ? 0 : 1;
}

int cmd_delta(const std::string& input, bool tokens, std::size_t maxN) {
  auto text = parse_symbols(read_all(input), tokens);
  if (text.empty()) throw std::runtime_error("input is empty");
  if (text.size() > maxN)
    throw std::runtime_error("input has " + std::to_string(text.size()) +
                             " symbols; the exact computation is quadratic, raise --max-n to allow it");
  auto d = oracle::delta(text).reduced();
  std::cout << "delta," << d.str() << "\n";
  std::cout << "k,d_k\n";
  auto table = oracle::dk_table(text);
  for (std::size_t k = 0; k < table.size(); ++k) std::cout << k + 1 << "," << table[k] << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed text index with streaming construction"};
  app.require_subcommand(1);

  std::string input, output, statsPath, indexPath, patternFile, textPath;
  std::vector<std::string> patterns;
  bool tokens = false, det = false, countOnly = false, asJson = false;
  int probes = 200;
  std::uint64_t seed = 1;
  std::size_t maxN = 1 << 16, rebuildLimit = 1 << 14;

  auto* build = app.add_subcommand("build", "Index a text in one pass");
  build->add_option("input", input, "Text file, or - for stdin")->required();
  build->add_option("-o,--output", output, "Index file")->required();
  build->add_flag("--deterministic", det, "Ordered dictionaries for bit-identical output");
  build->add_flag("--tokens,!--bytes", tokens, "Read integer tokens instead of bytes");
  build->add_option("--stats-json", statsPath, "Write construction statistics");
  bool withDelta = false;
  build->add_flag("--delta", withDelta, "Add the exact substring complexity to the statistics (n <= --max-n)");
  build->add_option("--max-n", maxN, "Largest n for --delta");

  auto* stats = app.add_subcommand("stats", "Describe an index file");
  stats->add_option("index", indexPath, "Index file")->required();

  auto* srch = app.add_subcommand("search", "Report all occurrences of patterns");
  srch->add_option("index", indexPath, "Index file")->required();
  srch->add_option("-p,--pattern", patterns, "Pattern (repeatable)");
  srch->add_option("--pattern-file", patternFile, "One pattern per line");
  srch->add_flag("--tokens,!--bytes", tokens, "Patterns are integer tokens");
  srch->add_flag("--count-only", countOnly, "Print only occurrence counts");
  srch->add_flag("--json", asJson, "JSON output");

  auto* ver = app.add_subcommand("verify", "Check an index file");
  ver->add_option("index", indexPath, "Index file")->required();
  ver->add_option("text", textPath, "Original text to compare against");
  ver->add_flag("--tokens,!--bytes", tokens, "Text is integer tokens");
  ver->add_option("--probes", probes, "Random searches checked against a scan")->check(CLI::NonNegativeNumber);
  ver->add_option("--seed", seed, "Probe seed");
  ver->add_option("--rebuild-limit", rebuildLimit, "Largest n rebuilt offline for comparison");

  auto* del = app.add_subcommand("delta", "Substring-complexity measure of a text");
  del->add_option("input", input, "Text file, or - for stdin")->required();
  del->add_flag("--tokens,!--bytes", tokens, "Read integer tokens instead of bytes");
  del->add_option("--max-n", maxN, "Refuse longer inputs");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*build) return cmd_build(input, output, tokens, det, statsPath, withDelta, maxN);
    if (*stats) return cmd_stats(indexPath);
    if (*srch) return cmd_search(indexPath, patterns, patternFile, tokens, countOnly, asJson);
    if (*ver) return cmd_verify(indexPath, textPath, tokens, probes, seed, rebuildLimit);
    if (*del) return cmd_delta(input, tokens, maxN);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
