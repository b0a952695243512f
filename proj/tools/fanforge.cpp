// fanforge command-line tool. Exit codes: 0 pass, 2 domain-negative, 1 error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fanforge/analyze.hpp"
#include "fanforge/closedset.hpp"
#include "fanforge/construct.hpp"
#include "fanforge/errors.hpp"
#include "fanforge/geometry.hpp"
#include "fanforge/homeo.hpp"
#include "fanforge/io.hpp"
#include "fanforge/svg.hpp"

using namespace fanforge;
using Json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string set, set1, set2, in, out, style = "comb", scheme = "odd", target, eps = "1/27";
  int depth = 3, branch = 6, cantor_depth = 0, m = 1, samples = 200, max_index_length = 2, sheets = 4;
  std::string resolution = "1/10000";
};

// Output goes to --out when given, standard output otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) std::cout << text;
  else write_text_file(o.out, text);
}

std::string read_input(const Options& o) {
  if (o.in.empty()) throw ArgumentError("--in is required");
  return read_text_file(o.in);
}

ClosedSetDesc need_set(const std::string& expr, const char* flag) {
  if (expr.empty()) throw ArgumentError(std::string(flag) + " is required");
  return parse_set_expr(expr);
}

BladeIndex parse_index(const std::string& s) {
  BladeIndex idx;
  if (s.empty() || s == "()") return idx;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) idx.path.push_back(std::stoi(part));
  return idx;
}

// "top" or "i,j@h"
FanPoint parse_fan_point(const std::string& s) {
  if (s == "top") return FanPoint::top();
  auto at = s.find('@');
  if (at == std::string::npos) throw ArgumentError("target must be 'top' or 'index@height'");
  return FanPoint::on(parse_index(s.substr(0, at)), parse_rational(s.substr(at + 1)));
}

// "top", "base:i,j@h" or "sheet:n,pos@s"
SpatialPoint parse_spatial_point(const std::string& s) {
  if (s == "top") return SpatialPoint{SpatialPoint::Top{}};
  auto colon = s.find(':'), at = s.find('@');
  if (colon == std::string::npos || at == std::string::npos)
    throw ArgumentError("spatial target must be 'top', 'base:index@h' or 'sheet:n,pos@s'");
  std::string kind = s.substr(0, colon), body = s.substr(colon + 1, at - colon - 1);
  Rational v = parse_rational(s.substr(at + 1));
  if (kind == "base") return SpatialPoint{SpatialPoint::Base{parse_index(body), v}};
  if (kind == "sheet") {
    auto idx = parse_index(body);
    if (idx.path.size() != 2) throw ArgumentError("sheet target needs 'n,pos'");
    return SpatialPoint{SpatialPoint::OnSheet{idx.path[0], static_cast<std::size_t>(idx.path[1]), v}};
  }
  throw ArgumentError("unknown spatial target kind '" + kind + "'");
}

int cmd_classify(const Options& o) {
  auto v = classify_feasibility(need_set(o.set, "--set"));
  if (v.feasible) {
    std::cout << "feasible " << to_string(*v.kind) << "\n";
    return 0;
  }
  std::cout << "infeasible " << to_string(*v.reason) << "\n";
  return 2;
}

int cmd_build(const Options& o) {
  auto X = need_set(o.set, "--set");
  auto v = classify_feasibility(X);
  if (!v.feasible) {
    std::cerr << "infeasible: " << to_string(*v.reason) << "\n";
    return 2;
  }
  Comb c = build_fan(X, o.depth, o.branch, o.cantor_depth);
  emit(o, encode_comb(c));
  std::cerr << c.size() << " blades\n";
  return 0;
}

int cmd_verify(const Options& o) {
  Comb c = decode_comb(read_input(o));
  ClosedSetDesc X = o.set.empty() ? (c.meta().source ? *c.meta().source : throw MetadataError("comb has no source; pass --set"))
                                  : parse_set_expr(o.set);
  Rational eps = parse_rational(o.eps);
  if (eps <= 0) throw ArgumentError("--eps must be positive");
  auto r = verify_epg(c, X, eps, o.max_index_length);
  emit(o, encode_verify_report(r, o.in));
  Rational worst = 0;
  for (const auto& b : r.blades) worst = rmax(worst, b.gap);
  std::cerr << (r.pass ? "pass" : "fail") << ": " << r.blades.size() << " blades, max gap " << to_decimal_upper(worst, 6)
            << "\n";
  return r.pass ? 0 : 2;
}

int cmd_equiv(const Options& o) {
  auto r = equivalently_embedded(need_set(o.set1, "--set1"), need_set(o.set2, "--set2"));
  Json j;
  switch (r.verdict) {
    case EquivalenceResult::Verdict::Yes: j["verdict"] = "yes"; break;
    case EquivalenceResult::Verdict::No: j["verdict"] = "no"; break;
    default: j["verdict"] = "unknown";
  }
  if (r.witness) {
    Json pts = Json::array();
    for (const auto& [x, y] : r.witness->breakpoints()) pts.push_back(Json::array({to_string(x), to_string(y)}));
    j["witness"] = std::move(pts);
  }
  if (!r.distinguisher.empty()) j["distinguisher"] = r.distinguisher;
  emit(o, j.dump(1) + "\n");
  return r.verdict == EquivalenceResult::Verdict::Yes ? 0 : 2;
}

PartitionScheme scheme_of(const Options& o) {
  if (o.scheme != "odd" && o.scheme != "even") throw ArgumentError("--scheme must be odd or even");
  if (o.m < 1) throw ArgumentError("--m must be positive");
  return PartitionScheme{o.scheme == "odd" ? PartitionScheme::Odd : PartitionScheme::Even, o.m};
}

int cmd_partition(const Options& o) {
  PartitionScheme s = scheme_of(o);
  Comb c = o.in.empty() ? build_epg_comb(scheme_set(s), o.depth, o.branch) : decode_comb(read_input(o));
  std::map<std::string, int> counts;
  for (const auto& p : partition_sample(c, s, o.samples)) ++counts[to_string(label_partition(c, p, s))];
  int expected = scheme_class_count(s);
  Json j;
  j["scheme"] = to_string(s);
  j["samples"] = o.samples;
  j["expected_classes"] = expected;
  j["observed_classes"] = counts.size();
  j["counts"] = counts;
  emit(o, j.dump(1) + "\n");
  std::cerr << counts.size() << " labels observed, " << expected << " expected\n";
  return static_cast<int>(counts.size()) == expected ? 0 : 2;
}

int cmd_smooth(const Options& o) {
  std::string text = read_input(o);
  Rational res = parse_rational(o.resolution);
  Json reports = Json::array();
  bool all = true;
  auto add = [&](const SmoothnessReport& r, const std::string& label) {
    reports.push_back(Json::parse(encode_smoothness(r, label)));
    all = all && r.converges;
  };
  if (is_spatial_document(text)) {
    SpatialModel m = decode_spatial(text);
    std::string t = o.target.empty() ? "base:@3/4" : o.target;
    add(smoothness_scan(m, parse_spatial_point(t), "sheet-descent", res), t);
  } else {
    Comb c = decode_comb(text);
    if (!o.target.empty()) {
      add(smoothness_scan(c, parse_fan_point(o.target), "nearest-tips", res), o.target);
    } else {
      // tips of the blades of index length <= 1, at most --samples of them
      int n = 0;
      for (const auto& b : c.blades()) {
        if (b.index.length() > 1 || n >= o.samples) continue;
        ++n;
        add(smoothness_scan(c, FanPoint::on(b.index, b.tip), "nearest-tips", res), to_string(b.index) + "@" + to_string(b.tip));
      }
    }
  }
  Json j;
  j["converges"] = all;
  j["scans"] = std::move(reports);
  emit(o, j.dump(1) + "\n");
  std::cerr << (all ? "all scans converge" : "non-smooth witness found") << "\n";
  return all ? 0 : 2;
}

int cmd_render(const Options& o) {
  std::string text = read_input(o);
  RenderStyle style = parse_style(o.style);
  if (is_spatial_document(text)) {
    emit(o, render_svg(decode_spatial(text)));
  } else {
    if (style == RenderStyle::Spatial) throw ArgumentError("spatial style needs a spatial model file");
    emit(o, render_svg(decode_comb(text), style));
  }
  return 0;
}

int cmd_nonsmooth_demo(const Options& o) {
  SpatialModel m = build_nonsmooth_3d(o.sheets, o.depth, o.branch);
  if (!o.out.empty()) write_text_file(o.out, encode_spatial(m));
  SpatialPoint t = parse_spatial_point(o.target.empty() ? "base:@3/4" : o.target);
  auto r = smoothness_scan(m, t, "sheet-descent", parse_rational(o.resolution));
  std::cout << "target " << to_string(t) << "\n";
  std::cout << "converges " << (r.converges ? "yes" : "no") << "\n";
  std::cout << "witness_gap_lower " << r.witness_gap << "\n";
  return 0;
}

// key=value lines; '#' starts a comment
std::map<std::string, std::string> read_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::istringstream in(read_text_file(path));
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ArgumentError(path + ":" + std::to_string(no) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact smooth-fan constructions over the Cantor set"};
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config, "key=value file with option defaults");
  Options o;

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const Options&);
    std::vector<std::string> flags;
  };
  std::vector<Cmd> cmds{
      {"classify", "decide whether a set admits an endpoint-generated smooth fan", cmd_classify, {"set"}},
      {"build", "write the comb file for a feasible set", cmd_build, {"set", "depth", "branch", "cantor-depth", "out"}},
      {"verify", "check blade traces against the source set", cmd_verify, {"in", "set", "eps", "max-index-length", "out"}},
      {"equiv", "decide equivalent embedding of two sets", cmd_equiv, {"set1", "set2", "out"}},
      {"partition", "label sampled points by orbit class", cmd_partition,
       {"scheme", "m", "samples", "depth", "branch", "in", "out"}},
      {"smooth", "scan arcs for Hausdorff convergence", cmd_smooth, {"in", "target", "samples", "resolution", "out"}},
      {"render", "draw a comb or spatial model as SVG", cmd_render, {"in", "out", "style"}},
      {"nonsmooth-demo", "build the spatial model and report its witness gap", cmd_nonsmooth_demo,
       {"sheets", "depth", "branch", "target", "resolution", "out"}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    subs[c.name] = sub;
    for (const auto& f : c.flags) {
      std::string flag = "--" + f;
      if (f == "set") sub->add_option(flag, o.set, "set expression");
      else if (f == "set1") sub->add_option(flag, o.set1, "first set expression");
      else if (f == "set2") sub->add_option(flag, o.set2, "second set expression");
      else if (f == "depth") sub->add_option(flag, o.depth, "depth K")->check(CLI::Range(1, 12));
      else if (f == "branch") sub->add_option(flag, o.branch, "branch bound N")->check(CLI::Range(1, 64));
      else if (f == "cantor-depth") sub->add_option(flag, o.cantor_depth, "Cantor word length d")->check(CLI::Range(0, 12));
      else if (f == "eps") sub->add_option(flag, o.eps, "tolerance p/q");
      else if (f == "max-index-length") sub->add_option(flag, o.max_index_length, "skip deeper blades (-1: none)");
      else if (f == "scheme") sub->add_option(flag, o.scheme, "odd|even");
      else if (f == "m") sub->add_option(flag, o.m, "number of cutpoints a_i");
      else if (f == "samples") sub->add_option(flag, o.samples, "sample count")->check(CLI::Range(1, 100000));
      else if (f == "in") sub->add_option(flag, o.in, "input file");
      else if (f == "out") sub->add_option(flag, o.out, "output file (default: standard output)");
      else if (f == "style") sub->add_option(flag, o.style, "comb|fan|spatial");
      else if (f == "target") sub->add_option(flag, o.target, "target point");
      else if (f == "resolution") sub->add_option(flag, o.resolution, "Hausdorff resolution p/q");
      else if (f == "sheets") sub->add_option(flag, o.sheets, "number of sheets m")->check(CLI::Range(1, 64));
    }
  }

  try {
    // config values act as defaults: splice them in ahead of the command-line flags
    std::vector<std::string> args(argv + 1, argv + argc);
    auto cfg = std::find(args.begin(), args.end(), "--config");
    if (cfg != args.end() && cfg + 1 != args.end()) {
      std::string path = *(cfg + 1);
      auto sub_it = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return subs.count(a) > 0; });
      if (sub_it != args.end()) {
        CLI::App* sub = subs[*sub_it];
        std::vector<std::string> extra;
        for (const auto& [k, v] : read_config(path)) {
          std::string flag = "--" + k;
          if (!sub->get_option_no_throw(flag)) continue;
          if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
          extra.push_back(flag);
          extra.push_back(v);
        }
        args.insert(sub_it + 1, extra.begin(), extra.end());
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    for (const auto& c : cmds)
      if (subs[c.name]->parsed()) return c.run(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
