#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qnc/capacity.hpp"
#include "qnc/codeplan.hpp"
#include "qnc/config.hpp"
#include "qnc/constructions.hpp"
#include "qnc/errors.hpp"
#include "qnc/simulate.hpp"

namespace {

using namespace qnc;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << bytes;
}

struct Context {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int samples = 0;  // 0 picks the per-command default
  Json config;
  std::string raw;

  int samples_or(int fallback) const { return samples > 0 ? samples : fallback; }
};

Json envelope(const Context& ctx, const char* command) {
  Json j;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config_hash"] = fnv1a64_hex(ctx.raw);
  j["seed"] = ctx.seed;
  return j;
}

void emit(const Context& ctx, const Json& j) { write_file(ctx.out_path, j.dump(2) + "\n"); }

Rho0 rho0_choice(const Json& config) {
  if (!config.contains("rho0")) return Rho0::mixed;
  const std::string v = config.at("rho0").get<std::string>();
  if (v == "mixed") return Rho0::mixed;
  if (v == "pure_zero") return Rho0::pure_zero;
  throw ConfigError("rho0 must be 'mixed' or 'pure_zero'");
}

int cmd_construct(const Context& ctx) {
  const NetworkConfig nc = network_from_json(ctx.config);
  const CodePlan plan = plan_code(nc.net, rho0_choice(ctx.config));
  Json j = envelope(ctx, "construct");
  j["q"] = nc.spec->q();
  j["m0"] = plan.m0;
  j["m1"] = plan.m1;
  j["m_star"] = plan.m_star;
  j["m_star_star"] = plan.m_star_star;
  j["message_registers"] = plan.message_registers;
  j["rate_bits"] = plan.rate_bits;
  j["rate_logq"] = plan.message_registers;
  if (nc.was_dag) j["corruption_schedule"] = nc.schedule;
  emit(ctx, j);
  std::cout << "m* = " << plan.m_star << ", m** = " << plan.m_star_star
            << ", message registers = " << plan.message_registers << ", rate = " << plan.rate_bits
            << " bits (" << plan.message_registers << " log_q)\n";
  return 0;
}

int cmd_simulate(const Context& ctx) {
  const NetworkConfig nc = network_from_json(ctx.config);
  const CodePlan plan = plan_code(nc.net, rho0_choice(ctx.config));
  const Json& corr = config_field(ctx.config, "corruption");
  const std::string kind = config_field(corr, "kind").get<std::string>();
  const int q = nc.spec->q();

  Rng rng(ctx.seed);
  int samples = ctx.samples_or(20);
  std::vector<double> fidelities;
  if (kind == "adaptive") {
    const int memory = corr.contains("memory_dim") ? corr.at("memory_dim").get<int>() : q;
    for (int s = 0; s < samples; ++s) {
      const AdaptiveAdversary adv = rng.adversary(q, nc.net.m1, memory);
      fidelities.push_back(entanglement_fidelity(plan, nc.net, Adaptive{adv}));
    }
  } else if (kind == "individual") {
    const int count = corr.contains("kraus") ? corr.at("kraus").get<int>() : 2;
    for (int s = 0; s < samples; ++s) {
      std::vector<KrausChannel> gammas;
      for (int i = 0; i < nc.net.m1; ++i) gammas.push_back(rng.kraus_channel(q, count));
      fidelities.push_back(entanglement_fidelity(plan, nc.net, Individual{std::move(gammas)}));
    }
  } else if (kind == "mix_substitution") {
    samples = 1;
    fidelities.push_back(entanglement_fidelity(plan, nc.net, MixSubstitution{}));
  } else {
    throw ConfigError("corruption kind must be adaptive, individual, or mix_substitution");
  }

  double min_fid = 1.0;
  for (double f : fidelities) min_fid = std::min(min_fid, f);
  const bool verdict = min_fid >= 1.0 - 1e-9;

  Json j = envelope(ctx, "simulate");
  j["samples"] = samples;
  j["rate_bits"] = plan.rate_bits;
  j["fidelities"] = fidelities;
  j["min_fidelity"] = min_fid;
  j["tolerance"] = 1e-9;
  j["verdict"] = verdict;
  emit(ctx, j);
  std::cout << "samples = " << samples << ", min fidelity = " << min_fid
            << (verdict ? ", pass\n" : ", FAIL\n");
  return verdict ? 0 : 1;
}

int cmd_verify_direct(const Context& ctx) {
  const FieldRef spec = field_from_json(config_field(ctx.config, "field"));
  const int samples = ctx.samples_or(50);
  Rng rng(ctx.seed);

  std::vector<ChannelReport> reports;
  if (ctx.config.contains("network")) {
    const NetworkConfig nc = network_from_json(ctx.config);
    const int count = ctx.config.contains("kraus") ? ctx.config.at("kraus").get<int>() : 2;
    for (int s = 0; s < samples; ++s) {
      std::vector<KrausChannel> gammas;
      for (int i = 0; i < nc.net.m1; ++i) gammas.push_back(rng.kraus_channel(spec->q(), count));
      ChannelReport r = verify_direct_bound(nc.net, gammas);
      r.seed = static_cast<std::uint64_t>(s);
      reports.push_back(std::move(r));
    }
  } else {
    const int m0 = config_field(ctx.config, "m0").get<int>();
    const int m1 = config_field(ctx.config, "m1").get<int>();
    reports = direct_bound_sweep(spec, m0, m1, samples, rng);
  }

  bool all = true;
  double min_value = reports.front().coherent_info_bits;
  Json results = Json::array();
  for (const ChannelReport& r : reports) {
    min_value = std::min(min_value, r.coherent_info_bits);
    all = all && r.verdict;
    Json e;
    e["seed"] = r.seed;
    e["value_bits"] = r.coherent_info_bits;
    e["value_logq"] = r.coherent_info_logq;
    e["verdict"] = r.verdict;
    results.push_back(std::move(e));
    if (!r.verdict) {
      std::cout << "FAIL seed = " << r.seed << ", I_c = " << r.coherent_info_bits
                << " bits < " << r.bound_bits << " - " << r.tolerance << "\n";
    }
  }

  Json j = envelope(ctx, "verify-direct");
  j["samples"] = samples;
  j["bound_bits"] = reports.front().bound_bits;
  j["tolerance"] = reports.front().tolerance;
  j["min_value_bits"] = min_value;
  j["results"] = std::move(results);
  j["verdict"] = all;
  emit(ctx, j);
  std::cout << "bound = " << reports.front().bound_bits << " bits, min I_c = " << min_value
            << " bits over " << samples << " samples" << (all ? ", pass\n" : ", FAIL\n");
  return all ? 0 : 1;
}

int cmd_verify_converse(const Context& ctx) {
  const NetworkConfig nc = network_from_json(ctx.config);
  const CodePlan plan = plan_code(nc.net, rho0_choice(ctx.config));
  Json j = envelope(ctx, "verify-converse");
  j["m_star"] = plan.m_star;
  j["m_star_star"] = plan.m_star_star;
  try {
    const ChannelReport r = verify_converse(plan, nc.net);
    j["bound_bits"] = r.bound_bits;
    j["value_bits"] = r.coherent_info_bits;
    j["value_logq"] = r.coherent_info_logq;
    j["tolerance"] = r.tolerance;
    j["verdict"] = r.verdict;
    emit(ctx, j);
    std::cout << "I_c = " << r.coherent_info_bits << " bits vs " << r.bound_bits
              << ", factorization ok" << (r.verdict ? ", pass\n" : ", FAIL\n");
    return r.verdict ? 0 : 1;
  } catch (const ConverseMismatch& e) {
    j["verdict"] = false;
    j["reason"] = e.what();
    emit(ctx, j);
    std::cout << "FAIL: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify_classical(const Context& ctx) {
  const int d = config_field(ctx.config, "d").get<int>();
  const int m0 = config_field(ctx.config, "m0").get<int>();
  const int m1 = config_field(ctx.config, "m1").get<int>();

  std::vector<std::pair<std::uint64_t, ClassicalReport>> reports;
  if (ctx.config.contains("f_list")) {
    std::vector<std::vector<int>> fs;
    for (const Json& f : ctx.config.at("f_list")) fs.push_back(f.get<std::vector<int>>());
    std::vector<std::vector<std::vector<double>>> kernels;
    for (const Json& k : config_field(ctx.config, "kernels")) {
      kernels.push_back(k.get<std::vector<std::vector<double>>>());
    }
    reports.emplace_back(0, classical_bound_check(d, m0, m1, fs, kernels));
  } else {
    const int samples = ctx.samples_or(100);
    Rng rng(ctx.seed);
    std::size_t n = 1;
    for (int i = 0; i < m0; ++i) n *= static_cast<std::size_t>(d);
    for (int s = 0; s < samples; ++s) {
      std::vector<std::vector<int>> fs;
      for (int i = 0; i <= m1; ++i) {
        std::vector<int> p(n);
        for (std::size_t x = 0; x < n; ++x) p[x] = static_cast<int>(x);
        for (std::size_t x = n - 1; x > 0; --x) std::swap(p[x], p[rng.integer(x + 1)]);
        fs.push_back(std::move(p));
      }
      std::vector<std::vector<std::vector<double>>> kernels;
      for (int i = 0; i < m1; ++i) {
        std::vector<std::vector<double>> k(d, std::vector<double>(d, 0.0));
        for (int c = 0; c < d; ++c) {
          double total = 0.0;
          for (int y = 0; y < d; ++y) {
            k[y][c] = rng.uniform() + 1e-3;
            total += k[y][c];
          }
          for (int y = 0; y < d; ++y) k[y][c] /= total;
        }
        kernels.push_back(std::move(k));
      }
      reports.emplace_back(static_cast<std::uint64_t>(s),
                           classical_bound_check(d, m0, m1, fs, kernels));
    }
  }

  bool all = true;
  double min_info = reports.front().second.info_bits;
  Json results = Json::array();
  for (const auto& [s, r] : reports) {
    min_info = std::min(min_info, r.info_bits);
    all = all && r.verdict;
    Json e;
    e["seed"] = s;
    e["info_bits"] = r.info_bits;
    e["verdict"] = r.verdict;
    results.push_back(std::move(e));
    if (!r.verdict) std::cout << "FAIL seed = " << s << ", I = " << r.info_bits << " bits\n";
  }

  Json j = envelope(ctx, "verify-classical");
  j["samples"] = static_cast<int>(reports.size());
  j["bound_bits"] = reports.front().second.bound_bits;
  j["tolerance"] = reports.front().second.tolerance;
  j["min_info_bits"] = min_info;
  j["results"] = std::move(results);
  j["verdict"] = all;
  emit(ctx, j);
  std::cout << "bound = " << reports.front().second.bound_bits << " bits, min I = " << min_info
            << " bits over " << reports.size() << " samples" << (all ? ", pass\n" : ", FAIL\n");
  return all ? 0 : 1;
}

int cmd_gen(const Context& ctx) {
  const FieldRef spec = field_from_json(config_field(ctx.config, "field"));
  const int m0 = config_field(ctx.config, "m0").get<int>();
  const int m1 = config_field(ctx.config, "m1").get<int>();

  LayeredNetwork net = [&] {
    if (ctx.config.contains("triple")) {
      const Json& t = ctx.config.at("triple");
      RankTriple triple{config_field(t, "l1").get<int>(), config_field(t, "l2").get<int>(),
                        config_field(t, "l3").get<int>(), m0, m1};
      return rank_triple_network(triple, spec);
    }
    if (ctx.config.contains("worst_case") && ctx.config.at("worst_case").get<bool>()) {
      return worst_case_network(m0, m1, spec);
    }
    throw ConfigError("gen needs a 'triple' or 'worst_case': true");
  }();

  Json j;
  j["field"] = field_to_json(spec);
  j["network"] = network_to_json(net);
  emit(ctx, j);
  std::cout << "wrote layered network: m0 = " << net.m0 << ", m1 = " << net.m1
            << ", layers = " << net.layers.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum network code construction and capacity verification"};
  app.require_subcommand(1);

  Context ctx;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ctx.config_path, "scenario config file")->required();
    sub->add_option("--out", ctx.out_path, "report output file")->required();
    sub->add_option("--seed", ctx.seed, "random seed");
    sub->add_option("--samples", ctx.samples, "sample count override");
  };

  CLI::App* c_construct = app.add_subcommand("construct", "build the code plan for a network");
  CLI::App* c_simulate = app.add_subcommand("simulate", "run corruption models against the plan");
  CLI::App* c_direct = app.add_subcommand("verify-direct", "check the achievability bound");
  CLI::App* c_converse = app.add_subcommand("verify-converse", "check the substitution channel");
  CLI::App* c_classical = app.add_subcommand("verify-classical", "check the classical bound");
  CLI::App* c_gen = app.add_subcommand("gen", "emit a network config for a rank triple");
  for (CLI::App* sub : {c_construct, c_simulate, c_direct, c_converse, c_classical, c_gen}) {
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ctx.raw = read_file(ctx.config_path);
    ctx.config = Json::parse(ctx.raw);
    if (c_construct->parsed()) return cmd_construct(ctx);
    if (c_simulate->parsed()) return cmd_simulate(ctx);
    if (c_direct->parsed()) return cmd_verify_direct(ctx);
    if (c_converse->parsed()) return cmd_verify_converse(ctx);
    if (c_classical->parsed()) return cmd_verify_classical(ctx);
    return cmd_gen(ctx);
  } catch (const NoCapacity& e) {
    std::cerr << "no capacity: " << e.what() << "\n";
    return 1;
  } catch (const ConverseMismatch& e) {
    std::cerr << "converse mismatch: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
