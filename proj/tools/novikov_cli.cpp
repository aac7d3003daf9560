// novikov-cli: command line front end over the C API.
//
// Every subcommand prints its primary JSON result on stdout and, with
// --out-dir, writes it together with a run manifest. Exit codes follow the
// library status codes: 0 ok, 1 not found, 2 budget, 3 inconsistent,
// 4 rejected, 64 usage, 65 invalid input, 70 internal.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "novikov/novikov.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct ContextDeleter {
  void operator()(nv_context *c) const { nv_context_free(c); }
};
using Context = std::unique_ptr<nv_context, ContextDeleter>;

// A failure that maps straight to an exit status.
struct Exit {
  int code;
  std::string message;
};

struct Input {
  std::string path;
  std::string sha256;
};

struct Run {
  Context ctx{nv_context_new()};
  std::vector<Input> inputs;
  json parameters = json::object();
  std::string out_dir;
  bool strict = false;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Exit{NV_USAGE, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256(Run &run, const std::string &data) {
  char *hex = nullptr;
  if (nv_sha256(run.ctx.get(), data.data(), data.size(), &hex) != NV_OK)
    throw Exit{NV_INTERNAL, nv_last_error(run.ctx.get())};
  std::string out = hex;
  nv_string_free(hex);
  return out;
}

// Reads an input file, records its hash and parses it as JSON.
json load_json(Run &run, const std::string &path) {
  const std::string text = read_file(path);
  run.inputs.push_back({path, sha256(run, text)});
  try {
    return json::parse(text);
  } catch (const json::exception &e) {
    throw Exit{NV_INVALID_INPUT, path + ": " + e.what()};
  }
}

std::int64_t env_int(const char *name) {
  const char *v = std::getenv(name);
  if (!v || !*v)
    return -1;
  try {
    return std::stoll(v);
  } catch (const std::exception &) {
    throw Exit{NV_USAGE, std::string(name) + " must be an integer"};
  }
}

// Budget caps from NOVIKOV_MAX_WORD_LENGTH and NOVIKOV_SUPPORT_CAP.
json budget_limits() {
  json lim = json::object();
  if (auto v = env_int("NOVIKOV_MAX_WORD_LENGTH"); v >= 0)
    lim["max_length"] = v;
  if (auto v = env_int("NOVIKOV_SUPPORT_CAP"); v >= 0)
    lim["support_cap"] = v;
  return lim;
}

json parse_character(const std::string &text) {
  json out = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find('/') != std::string::npos)
      out.push_back(item);
    else
      try {
        out.push_back(std::stoll(item));
      } catch (const std::exception &) {
        throw Exit{NV_USAGE, "bad character entry '" + item + "'"};
      }
  }
  if (out.empty())
    throw Exit{NV_USAGE, "character must be a comma separated list"};
  return out;
}

struct ComplexArgs {
  std::string fixture;
  std::string complex;
  std::string group;
};

void add_complex_options(CLI::App *cmd, ComplexArgs &a) {
  cmd->add_option("--fixture", a.fixture, "built-in fixture name");
  cmd->add_option("--complex", a.complex, "complex JSON file or fixture name");
  cmd->add_option("--group", a.group, "group spec JSON file");
}

// Adds the complex selection to a request.
void resolve_complex(Run &run, const ComplexArgs &a, json &req) {
  if (!a.fixture.empty()) {
    req["fixture"] = a.fixture;
  } else if (!a.complex.empty()) {
    if (fs::exists(a.complex))
      req["complex"] = load_json(run, a.complex);
    else
      req["fixture"] = a.complex;
  } else {
    throw Exit{NV_USAGE, "pass --fixture or --complex"};
  }
  if (!a.group.empty())
    req["group"] = load_json(run, a.group);
}

int call(Run &run, const std::string &command, json req, json &resp) {
  const json lim = budget_limits();
  if (!lim.empty())
    req["limits"] = lim;
  char *out = nullptr;
  const int status = nv_run(run.ctx.get(), command.c_str(), req.dump().c_str(), &out);
  if (out) {
    resp = json::parse(out);
    nv_string_free(out);
  }
  if (!out && status != NV_OK)
    throw Exit{status, nv_last_error(run.ctx.get())};
  return status;
}

void write_text(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  if (!out)
    throw Exit{NV_USAGE, "cannot write " + p.string()};
  out << text;
}

std::string pretty(const json &j) { return j.dump(2) + "\n"; }

// Prints the result and writes outputs plus manifest under --out-dir.
void emit(Run &run, const std::string &command, int status,
          const std::vector<std::pair<std::string, json>> &outputs, double seconds,
          const json &outcome) {
  if (!outputs.empty())
    std::cout << pretty(outputs.front().second);
  if (run.out_dir.empty())
    return;
  fs::create_directories(run.out_dir);
  json outs = json::array();
  for (const auto &[name, value] : outputs) {
    const std::string text = pretty(value);
    write_text(fs::path(run.out_dir) / name, text);
    outs.push_back({{"path", name}, {"sha256", sha256(run, text)}});
  }
  json ins = json::array();
  for (const auto &in : run.inputs)
    ins.push_back({{"path", in.path}, {"sha256", in.sha256}});
  json manifest = {{"tool", "novikov-cli"},
                   {"version", nv_version()},
                   {"command", command},
                   {"inputs", ins},
                   {"parameters", run.parameters},
                   {"wall_time_seconds", seconds},
                   {"outputs", outs},
                   {"outcome", outcome},
                   {"status", status},
                   {"status_name", nv_status_name(status)}};
  write_text(fs::path(run.out_dir) / "manifest.json", pretty(manifest));
}

// Replays a manifest: checks input hashes and returns the recorded argv.
std::vector<std::string> replay_args(Run &run, const std::string &path) {
  const json m = json::parse(read_file(path));
  for (const auto &in : m.at("inputs")) {
    const std::string p = in.at("path").get<std::string>();
    std::string actual;
    try {
      actual = sha256(run, read_file(p));
    } catch (const Exit &) {
      actual = "missing";
    }
    if (actual != in.at("sha256").get<std::string>()) {
      if (run.strict)
        throw Exit{NV_INVALID_INPUT, "input " + p + " does not match the manifest hash"};
      std::cerr << "warning: input " << p << " changed since the manifest was written\n";
    }
  }
  return m.at("parameters").at("argv").get<std::vector<std::string>>();
}

int dispatch(std::vector<std::string> args, Run &run, bool allow_manifest);

int run_main(int argc, char **argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i)
    args.emplace_back(argv[i]);
  Run run;
  if (!run.ctx) {
    std::cerr << "error: cannot allocate context\n";
    return NV_INTERNAL;
  }
  try {
    return dispatch(std::move(args), run, true);
  } catch (const Exit &e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const json::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return NV_INVALID_INPUT;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return NV_INTERNAL;
  }
}

int dispatch(std::vector<std::string> args, Run &run, bool allow_manifest) {
  CLI::App app{"Novikov ring contractions, BNSR campaigns and approximate Ore solving"};
  app.require_subcommand(0, 1);
  std::string manifest;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  app.add_option("--out-dir", run.out_dir, "directory for outputs and manifest.json");
  app.add_option("--threads", threads, "worker threads (default: available cores)");
  app.add_option("--seed", seed, "seed for generic-combination draws");
  app.add_flag("--strict", run.strict, "refuse a manifest whose inputs changed");
  if (allow_manifest)
    app.add_option("--manifest", manifest, "replay the run recorded in a manifest");

  ComplexArgs cx;
  std::string character;
  int degree = 1, word_length = 4, retries = 0;
  std::optional<int> window;
  int depth = 6;
  std::optional<int> witness_length, boundary_length;
  bool witness = false;

  auto *check = app.add_subcommand("check-contraction", "search for a chain contraction certificate");
  add_complex_options(check, cx);
  check->add_option("--character", character, "character values, e.g. 1,0")->required();
  check->add_option("--degree", degree, "contraction degree k");
  check->add_option("--word-length", word_length, "ansatz word length L");
  check->add_option("--window", window, "ansatz window W (default L)");
  check->add_option("--retries", retries, "window doublings");
  check->add_flag("--witness", witness, "run the kernel witness when no certificate is found");
  check->add_option("--depth", depth, "witness depth");
  check->add_option("--witness-length", witness_length, "witness word length");
  check->add_option("--witness-boundary-length", boundary_length,
                    "witness boundary preimage length");

  std::string chars = "auto";
  std::string out_name;
  auto *bnsr = app.add_subcommand("bnsr-certify", "run a character campaign");
  add_complex_options(bnsr, cx);
  bnsr->add_option("--degree", degree, "degree n");
  bnsr->add_option("--chars", chars, "characters JSON file or 'auto'");
  bnsr->add_option("--word-length", word_length, "ansatz word length L");
  bnsr->add_option("--window", window, "ansatz window W (default L)");
  bnsr->add_option("--retries", retries, "window doublings");
  bnsr->add_option("--witness-depth", depth, "witness depth");
  bnsr->add_option("--witness-length", witness_length, "witness word length");
  bnsr->add_option("--witness-boundary-length", boundary_length,
                   "witness boundary preimage length (default: witness length)");
  bnsr->add_option("--out", out_name, "report file name");

  std::string cert_path;
  auto *verify = app.add_subcommand("verify", "verify a certificate against a complex");
  verify->add_option("certificate", cert_path, "certificate JSON")->required();
  add_complex_options(verify, cx);
  std::string cosets;
  verify->add_option("--cosets", cosets, "coset table JSON: also run the finite-index transfer check");

  std::optional<std::int64_t> radius;
  int doublings = 10;
  auto *rebuild = app.add_subcommand("rebuild", "rebuild a certificate over the division closure");
  rebuild->add_option("certificate", cert_path, "certificate JSON")->required();
  add_complex_options(rebuild, cx);
  rebuild->add_option("--radius", radius, "starting truncation radius");
  rebuild->add_option("--max-doublings", doublings, "radius doublings before giving up");

  std::string instance;
  auto *ore = app.add_subcommand("ore-approx", "approximate Ore condition for twisted polynomials");
  ore->add_option("instance", instance, "instance JSON")->required();

  auto *l2 = app.add_subcommand("l2-approx", "normalized Betti numbers of finite quotients");
  l2->add_option("input", instance, "JSON with complex (or fixture) and quotients")->required();

  auto *euler = app.add_subcommand("euler", "Euler characteristic and euler-rule report");
  add_complex_options(euler, cx);

  bool materialize = false;
  auto *fixtures = app.add_subcommand("fixtures", "list built-in fixtures");
  fixtures->add_flag("--materialize", materialize, "include the complexes and write them to --out-dir");

  const std::vector<std::string> original = args;
  try {
    std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp &e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return NV_USAGE;
  }
  if (!manifest.empty()) {
    if (!app.get_subcommands().empty())
      throw Exit{NV_USAGE, "--manifest cannot be combined with a subcommand"};
    auto replay = replay_args(run, manifest);
    if (!run.out_dir.empty())
      replay.insert(replay.begin(), {"--out-dir", run.out_dir});
    Run again;
    again.strict = run.strict;
    return dispatch(replay, again, false);
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return NV_USAGE;
  }
  if (threads == 0)
    throw Exit{NV_USAGE, "--threads must be positive"};

  // The replayable argv leaves out --out-dir so a replay can redirect it.
  std::vector<std::string> argv_record;
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (original[i] == "--out-dir") {
      ++i;
      continue;
    }
    if (original[i].rfind("--out-dir=", 0) == 0)
      continue;
    argv_record.push_back(original[i]);
  }
  run.parameters["argv"] = argv_record;

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  json req = json::object();
  json resp;

  if (*check) {
    resolve_complex(run, cx, req);
    req["character"] = parse_character(character);
    req["degree"] = degree;
    req["word_length"] = word_length;
    if (window)
      req["window"] = *window;
    req["retries"] = retries;
    run.parameters["request"] = req;
    int status = call(run, "search", req, resp);
    std::vector<std::pair<std::string, json>> outs;
    json outcome = {{"found", status == NV_OK}};
    if (status == NV_OK) {
      outs.emplace_back("certificate.json", resp.at("certificate"));
      resp.erase("certificate");
      outs.emplace_back("search.json", resp);
    } else {
      outs.emplace_back("search.json", resp);
      if (witness && status == NV_NOT_FOUND) {
        json wreq = req;
        wreq.erase("window");
        wreq.erase("retries");
        wreq["depth"] = depth;
        if (witness_length)
          wreq["word_length"] = *witness_length;
        else
          wreq.erase("word_length");
        if (boundary_length)
          wreq["boundary_length"] = *boundary_length;
        json wresp;
        const int ws = call(run, "witness", wreq, wresp);
        if (ws != NV_OK && ws != NV_BUDGET)
          throw Exit{ws, nv_last_error(run.ctx.get())};
        outs.emplace_back("witness.json", wresp);
        outcome["witness"] = wresp.at("verdict");
        std::cerr << "witness: " << wresp.at("verdict").get<std::string>() << "\n";
      }
    }
    if (status != NV_OK && status != NV_NOT_FOUND)
      throw Exit{status, nv_last_error(run.ctx.get())};
    std::cerr << (status == NV_OK ? "certificate found" : "no certificate within bounds") << "\n";
    emit(run, "check-contraction", status, outs, elapsed(), outcome);
    return status;
  }

  if (*bnsr) {
    resolve_complex(run, cx, req);
    if (chars == "auto")
      req["characters"] = "auto";
    else
      req["characters"] = load_json(run, chars);
    req["degree"] = degree;
    req["word_length"] = word_length;
    if (window)
      req["window"] = *window;
    req["retries"] = retries;
    req["witness_depth"] = depth;
    if (witness_length)
      req["witness_length"] = *witness_length;
    if (boundary_length)
      req["witness_boundary_length"] = *boundary_length;
    run.parameters["request"] = req;
    req["threads"] = threads;
    const int status = call(run, "campaign", req, resp);
    if (status != NV_OK && status != NV_BUDGET && status != NV_INCONSISTENT)
      throw Exit{status, nv_last_error(run.ctx.get())};
    std::cerr << resp.at("summary").get<std::string>();
    resp.erase("summary");
    emit(run, "bnsr-certify", status, {{out_name.empty() ? "report.json" : out_name, resp}},
         elapsed(), {{"counts", resp.at("counts")}, {"exit", status}});
    return status;
  }

  if (*verify) {
    resolve_complex(run, cx, req);
    req["certificate"] = load_json(run, cert_path);
    run.parameters["certificate"] = cert_path;
    int status = call(run, "verify", req, resp);
    if (status != NV_OK && status != NV_REJECTED)
      throw Exit{status, nv_last_error(run.ctx.get())};
    std::vector<std::pair<std::string, json>> outs{{"verdict.json", resp}};
    json outcome = {{"accepted", status == NV_OK}};
    if (status == NV_OK && !cosets.empty()) {
      req["cosets"] = load_json(run, cosets);
      json tresp;
      status = call(run, "transfer", req, tresp);
      if (status != NV_OK && status != NV_REJECTED)
        throw Exit{status, nv_last_error(run.ctx.get())};
      outs.emplace_back("transfer.json", tresp);
      outcome["transfer_accepted"] = status == NV_OK;
    }
    std::cerr << (status == NV_OK ? "accepted" : "rejected") << "\n";
    emit(run, "verify", status, outs, elapsed(), outcome);
    return status;
  }

  if (*rebuild) {
    resolve_complex(run, cx, req);
    req["certificate"] = load_json(run, cert_path);
    if (radius)
      req["radius"] = *radius;
    req["max_doublings"] = doublings;
    run.parameters["certificate"] = cert_path;
    const int status = call(run, "rebuild", req, resp);
    if (status != NV_OK && status != NV_REJECTED)
      throw Exit{status, nv_last_error(run.ctx.get())};
    emit(run, "rebuild", status, {{"rebuild.json", resp}}, elapsed(), {{"status", status}});
    return status;
  }

  if (*ore) {
    req = load_json(run, instance);
    req["seed"] = seed;
    run.parameters["seed"] = seed;
    const bool common = req.contains("q") && req.at("q").is_array() && !req.at("q").empty() &&
                        req.at("q").front().is_array();
    const int status = call(run, common ? "common-multiple" : "ore-approx", req, resp);
    if (status != NV_OK)
      throw Exit{status, nv_last_error(run.ctx.get())};
    emit(run, "ore-approx", status, {{"ore.json", resp}}, elapsed(),
         {{"exact", resp.value("exact", true)}});
    return status;
  }

  if (*l2) {
    req = load_json(run, instance);
    const int status = call(run, "l2-quotients", req, resp);
    if (status != NV_OK)
      throw Exit{status, nv_last_error(run.ctx.get())};
    emit(run, "l2-approx", status, {{"l2.json", resp}}, elapsed(), json::object());
    return status;
  }

  if (*euler) {
    resolve_complex(run, cx, req);
    const int status = call(run, "euler", req, resp);
    if (status != NV_OK)
      throw Exit{status, nv_last_error(run.ctx.get())};
    std::cerr << "chi = " << resp.at("euler_characteristic") << "\n";
    emit(run, "euler", status, {{"euler.json", resp}}, elapsed(),
         {{"euler_characteristic", resp.at("euler_characteristic")}});
    return status;
  }

  if (*fixtures) {
    req["materialize"] = materialize;
    const int status = call(run, "fixtures", req, resp);
    if (status != NV_OK)
      throw Exit{status, nv_last_error(run.ctx.get())};
    std::vector<std::pair<std::string, json>> outs{{"fixtures.json", resp}};
    if (materialize)
      for (const auto &f : resp.at("fixtures"))
        outs.emplace_back(f.at("name").get<std::string>() + ".json", f.at("complex"));
    emit(run, "fixtures", status, outs, elapsed(), {{"count", resp.at("fixtures").size()}});
    return status;
  }
  return NV_USAGE;
}

} // namespace

int main(int argc, char **argv) { return run_main(argc, argv); }
