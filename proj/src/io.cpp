#include "cqed/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cqed/cavity_field.hpp"

namespace cqed {

namespace {

void append_full(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    double v = 0.0;
    const auto res =
        std::from_chars(line.data() + pos, line.data() + comma, v);
    if (res.ec != std::errc()) {
      throw std::runtime_error("record_from_csv: bad number in row");
    }
    out.push_back(v);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return out;
}

}  // namespace

std::string sha1_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha1(),
                 nullptr) != 1) {
    throw std::runtime_error("sha1_hex: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string git_blob_sha1(const std::string& bytes) {
  std::string framed = "blob " + std::to_string(bytes.size());
  framed += '\0';
  framed += bytes;
  return sha1_hex(framed);
}

std::string record_to_csv(const TrajectoryRecord& rec) {
  const bool two = rec.scheme == Scheme::two_quadrature;
  std::string out = two ? "t,I,Q,dW1,dW2\n" : "t,I,dW1\n";
  for (std::size_t k = 0; k < rec.steps(); ++k) {
    append_full(out, rec.times[k]);
    out += ',';
    append_full(out, rec.I[k]);
    if (two) {
      out += ',';
      append_full(out, rec.Q[k]);
    }
    out += ',';
    append_full(out, rec.dW1[k]);
    if (two) {
      out += ',';
      append_full(out, rec.dW2[k]);
    }
    out += '\n';
  }
  return out;
}

TrajectoryRecord record_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("record_from_csv: empty input");
  }
  TrajectoryRecord rec;
  bool two;
  if (line == "t,I,Q,dW1,dW2") {
    two = true;
    rec.scheme = Scheme::two_quadrature;
  } else if (line == "t,I,dW1") {
    two = false;
    rec.scheme = Scheme::single_quadrature;
  } else {
    throw std::runtime_error("record_from_csv: unrecognized header: " + line);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = parse_row(line);
    if (row.size() != (two ? 5u : 3u)) {
      throw std::runtime_error("record_from_csv: wrong column count");
    }
    rec.times.push_back(row[0]);
    rec.I.push_back(row[1]);
    if (two) {
      rec.Q.push_back(row[2]);
      rec.dW1.push_back(row[3]);
      rec.dW2.push_back(row[4]);
    } else {
      rec.dW1.push_back(row[2]);
    }
  }
  if (rec.steps() >= 2) {
    rec.dt = rec.times[1] - rec.times[0];
  } else if (rec.steps() == 1) {
    throw std::runtime_error("record_from_csv: need at least 2 samples");
  }
  return rec;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_text: cannot open " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_text: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json sim_config_to_json(const SimConfig& cfg) {
  nlohmann::json j;
  j["units"] = "kappa";
  j["params"] = {{"delta_r", cfg.params.delta_r},
                 {"chi", cfg.params.chi},
                 {"eps_m", cfg.params.eps_m},
                 {"kappa", cfg.params.kappa},
                 {"omega_q_tilde", cfg.params.omega_q_tilde},
                 {"phi_lo", cfg.params.phi_lo}};
  j["nmax"] = cfg.nmax;
  j["dt"] = cfg.dt;
  j["t_end"] = cfg.t_end;
  j["scheme"] = cfg.scheme == Scheme::two_quadrature ? "two_quadrature"
                                                     : "single_quadrature";
  j["seed"] = cfg.seed;
  j["initial_qubit"] = {cfg.initial_qubit_g.real(), cfg.initial_qubit_g.imag(),
                        cfg.initial_qubit_e.real(), cfg.initial_qubit_e.imag()};
  j["initial_cavity"] = {cfg.initial_cavity.real(), cfg.initial_cavity.imag()};
  j["snapshot_interval"] = cfg.snapshot_interval;
  j["store_snapshots"] = cfg.store_snapshots;
  return j;
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig cfg;
  const auto& p = j.at("params");
  cfg.params.delta_r = p.value("delta_r", 0.0);
  cfg.params.chi = p.value("chi", 0.0);
  cfg.params.eps_m = p.value("eps_m", 0.0);
  cfg.params.kappa = p.value("kappa", 1.0);
  cfg.params.omega_q_tilde = p.value("omega_q_tilde", 0.0);
  cfg.params.phi_lo = p.value("phi_lo", 0.0);
  cfg.nmax = j.value("nmax", 0);
  cfg.dt = j.value("dt", 1e-3);
  cfg.t_end = j.at("t_end").get<double>();
  const std::string scheme = j.value("scheme", "single_quadrature");
  if (scheme == "two_quadrature") {
    cfg.scheme = Scheme::two_quadrature;
  } else if (scheme == "single_quadrature") {
    cfg.scheme = Scheme::single_quadrature;
  } else {
    throw std::runtime_error("sim_config_from_json: unknown scheme " + scheme);
  }
  cfg.seed = j.value("seed", 0ull);
  if (j.contains("initial_qubit")) {
    const auto& q = j.at("initial_qubit");
    cfg.initial_qubit_g = Complex(q.at(0).get<double>(), q.at(1).get<double>());
    cfg.initial_qubit_e = Complex(q.at(2).get<double>(), q.at(3).get<double>());
  }
  if (j.contains("initial_cavity")) {
    const auto& c = j.at("initial_cavity");
    cfg.initial_cavity = Complex(c.at(0).get<double>(), c.at(1).get<double>());
  }
  cfg.snapshot_interval = j.value("snapshot_interval", 0.05);
  cfg.store_snapshots = j.value("store_snapshots", false);
  cfg.validate();
  return cfg;
}

SimConfig load_sim_config(const std::string& path) {
  return sim_config_from_json(nlohmann::json::parse(read_text(path)));
}

void write_record(const std::string& csv_path, const TrajectoryRecord& rec,
                  const SimConfig& cfg) {
  const std::string csv = record_to_csv(rec);
  write_text(csv_path, csv);
  nlohmann::json meta;
  meta["config"] = sim_config_to_json(cfg);
  meta["content_sha1"] = git_blob_sha1(csv);
  meta["steps"] = rec.steps();
  write_text(csv_path + ".json", meta.dump(2) + "\n");
}

TrajectoryRecord read_record(const std::string& csv_path) {
  return record_from_csv(read_text(csv_path));
}

nlohmann::json state_dump(const JointState& state) {
  nlohmann::json j;
  j["nmax"] = state.nmax;
  j["ordering"] = "qubit_major";
  std::vector<double> re(state.dim()), im(state.dim());
  for (int i = 0; i < state.dim(); ++i) {
    re[i] = state.amp(i).real();
    im[i] = state.amp(i).imag();
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

JointState state_from_dump(const nlohmann::json& j) {
  JointState s;
  s.nmax = j.at("nmax").get<int>();
  if (j.at("ordering").get<std::string>() != "qubit_major") {
    throw std::runtime_error("state_from_dump: unexpected ordering");
  }
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size() ||
      re.size() != static_cast<std::size_t>(2 * (s.nmax + 1))) {
    throw std::runtime_error("state_from_dump: size mismatch");
  }
  s.amp.resize(static_cast<int>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) {
    s.amp(static_cast<int>(i)) = Complex(re[i], im[i]);
  }
  return s;
}

std::string rates_csv(const ModelParams& p, Complex alpha0, double t_end,
                      double dt) {
  std::string out;
  out +=
      "# theta_beta = arg(alpha_e - alpha_g) on (-pi, pi]; for Delta_r = 0\n"
      "# and a vacuum start beta(t) is real negative, i.e. theta_beta = pi.\n"
      "# gamma_ci/gamma_ba use the LO phase phi_lo of the config.\n";
  out +=
      "t,re_alpha_g,im_alpha_g,re_alpha_e,im_alpha_e,B,gamma_d,gamma_ci,"
      "gamma_ba,gamma_m,D_overlap,D_integral\n";
  const std::size_t n = static_cast<std::size_t>(std::llround(t_end / dt));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const RateSet r = rates_at(t, p, alpha0);
    const double d_int = purity_integral(t, p, alpha0);
    append_full(out, t);
    for (double v : {r.alpha_g.real(), r.alpha_g.imag(), r.alpha_e.real(),
                     r.alpha_e.imag(), r.B, r.gamma_d, r.gamma_ci, r.gamma_ba,
                     r.gamma_m, r.purity_D, d_int}) {
      out += ',';
      append_full(out, v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cqed
