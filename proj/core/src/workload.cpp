#include "dsched/workload.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dsched/rng.hpp"

namespace dsched {

namespace {

std::vector<double> caps_or_default(const std::vector<double>& caps,
                                    int num_users, double fallback) {
  if (caps.empty()) return std::vector<double>(num_users, fallback);
  if (static_cast<int>(caps.size()) != num_users)
    throw std::invalid_argument("rate_caps size does not match num_users");
  return caps;
}

void append_number(std::string& line, double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  line += ' ';
  line += buf;
}

}  // namespace

double measure_f_max(const std::vector<Job>& jobs,
                     const std::vector<RateRegion>& regions) {
  double f_max = 0.0;
  for (const auto& job : jobs) {
    const int last = std::min<int>(job.deadline, regions.size() - 1);
    for (int t = job.arrival; t <= last; ++t)
      f_max = std::max(f_max, regions[t].max_rate(job.user) / job.size);
  }
  return f_max;
}

Instance generate_instance(const ScenarioConfig& config) {
  if (config.num_users <= 0 || config.horizon <= 0)
    throw std::invalid_argument("generate_instance: empty scenario");
  if (config.arrival_prob < 0.0 || config.arrival_prob > 1.0)
    throw std::invalid_argument("generate_instance: arrival_prob outside [0,1]");
  if (config.deadline_min < 1 || config.deadline_min > config.deadline_max)
    throw std::invalid_argument("generate_instance: bad deadline range");

  const auto caps = caps_or_default(config.rate_caps, config.num_users, 4.0);
  Rng rng(config.seed);

  Instance out;
  out.num_users = config.num_users;
  out.horizon = config.horizon;
  out.regions.reserve(config.horizon);

  int next_id = 0;
  for (int t = 0; t < config.horizon; ++t) {
    for (int n = 0; n < config.num_users; ++n) {
      if (!rng.bernoulli(config.arrival_prob)) continue;
      const int window = rng.uniform_int(config.deadline_min, config.deadline_max);
      const double size = rng.uniform(config.size_min, config.size_max);
      const double v = rng.uniform(config.v_min, config.v_max);
      const double psi = rng.uniform(config.psi_min, config.psi_max);
      Job job;
      job.id = next_id++;
      job.arrival = t;
      job.deadline = std::min(t + window - 1, config.horizon - 1);
      job.size = size;
      job.user = n;
      job.utility = PowerUtility(v, psi);
      out.jobs.push_back(job);
    }
    out.regions.push_back(
        sample_region(config.num_users, config.region_vertices, caps, rng));
  }

  out.f_max = measure_f_max(out.jobs, out.regions);
  return out;
}

StochasticInstance generate_frames(const FrameConfig& config) {
  if (config.num_users <= 0 || config.frame_len <= 0 || config.num_frames <= 0)
    throw std::invalid_argument("generate_frames: empty configuration");
  for (const auto& cls : config.classes) {
    if (cls.deadline < 1 || cls.deadline > config.frame_len)
      throw std::invalid_argument(
          "generate_frames: class deadline outside the frame");
    if (cls.user < 0 || cls.user >= config.num_users)
      throw std::invalid_argument("generate_frames: class user out of range");
    if (!(cls.size > 0.0))
      throw std::invalid_argument("generate_frames: class size must be > 0");
  }
  if (!config.targets.empty() &&
      static_cast<int>(config.targets.size()) != config.num_users)
    throw std::invalid_argument("generate_frames: targets size mismatch");

  const auto caps = caps_or_default(config.rate_caps, config.num_users, 0.5);
  Rng rng(config.seed);

  StochasticInstance out;
  out.num_users = config.num_users;
  out.frame_len = config.frame_len;
  out.targets = config.targets.empty()
                    ? std::vector<double>(config.num_users, 0.0)
                    : config.targets;

  out.region_set.reserve(config.region_set_size);
  for (int r = 0; r < config.region_set_size; ++r) {
    RateRegion region =
        sample_region(config.num_users, config.region_vertices, caps, rng);
    if (config.normalize_peak_rates) {
      auto verts = region.vertices();
      for (int n = 0; n < config.num_users; ++n) {
        const double peak = region.max_rate(n);
        if (peak > 0.0) {
          const double factor = caps[n] / peak;
          for (auto& v : verts) v[n] *= factor;
        }
      }
      region = RateRegion(config.num_users, std::move(verts));
    }
    out.region_set.push_back(std::move(region));
  }

  out.frames.reserve(config.num_frames);
  for (int k = 0; k < config.num_frames; ++k) {
    Frame frame;
    int next_id = 0;
    for (const auto& cls : config.classes) {
      if (!rng.bernoulli(cls.arrival_prob)) continue;
      Job job;
      job.id = next_id++;
      job.arrival = 0;
      job.deadline = cls.deadline - 1;  // frame-local, inclusive
      job.size = cls.size;
      job.user = cls.user;
      job.utility = PowerUtility(cls.v, cls.psi);
      frame.jobs.push_back(job);
    }
    frame.region_ids.reserve(config.frame_len);
    for (int t = 0; t < config.frame_len; ++t)
      frame.region_ids.push_back(
          static_cast<int>(rng.below(config.region_set_size)));
    out.frames.push_back(std::move(frame));
  }

  double f_max = 0.0;
  for (const auto& cls : config.classes)
    for (const auto& region : out.region_set)
      f_max = std::max(f_max, region.max_rate(cls.user) / cls.size);
  out.f_max = f_max;
  return out;
}

void write_instance(const Instance& instance, std::ostream& out) {
  out << "dsched-instance 1\n";
  out << "users " << instance.num_users << "\n";
  out << "horizon " << instance.horizon << "\n";
  {
    std::string line = "fmax";
    append_number(line, instance.f_max);
    out << line << "\n";
  }
  out << "jobs " << instance.jobs.size() << "\n";
  for (const auto& job : instance.jobs) {
    std::string line = "job";
    line += ' ';
    line += std::to_string(job.id);
    line += ' ';
    line += std::to_string(job.arrival);
    line += ' ';
    line += std::to_string(job.deadline);
    append_number(line, job.size);
    line += ' ';
    line += std::to_string(job.user);
    append_number(line, job.utility.scale());
    append_number(line, job.utility.curvature());
    out << line << "\n";
  }
  for (int t = 0; t < instance.horizon; ++t) {
    const auto& verts = instance.regions[t].vertices();
    out << "slot " << t << " " << verts.size() << "\n";
    for (const auto& v : verts) {
      std::string line = "v";
      for (double c : v) append_number(line, c);
      out << line << "\n";
    }
  }
  out << "end\n";
}

Instance read_instance(std::istream& in) {
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (tag != "dsched-instance" || version != 1)
    throw std::runtime_error("read_instance: unrecognized header");

  Instance out;
  size_t num_jobs = 0;
  in >> tag >> out.num_users;
  if (tag != "users") throw std::runtime_error("read_instance: expected users");
  in >> tag >> out.horizon;
  if (tag != "horizon") throw std::runtime_error("read_instance: expected horizon");
  in >> tag >> out.f_max;
  if (tag != "fmax") throw std::runtime_error("read_instance: expected fmax");
  in >> tag >> num_jobs;
  if (tag != "jobs") throw std::runtime_error("read_instance: expected jobs");

  out.jobs.reserve(num_jobs);
  for (size_t i = 0; i < num_jobs; ++i) {
    Job job;
    double v = 0.0, psi = 0.0;
    in >> tag >> job.id >> job.arrival >> job.deadline >> job.size >>
        job.user >> v >> psi;
    if (tag != "job") throw std::runtime_error("read_instance: expected job");
    job.utility = PowerUtility(v, psi);
    out.jobs.push_back(job);
  }

  out.regions.reserve(out.horizon);
  for (int t = 0; t < out.horizon; ++t) {
    int slot = 0;
    size_t num_verts = 0;
    in >> tag >> slot >> num_verts;
    if (tag != "slot" || slot != t)
      throw std::runtime_error("read_instance: expected slot record");
    std::vector<std::vector<double>> verts(num_verts,
                                           std::vector<double>(out.num_users));
    for (auto& vert : verts) {
      in >> tag;
      if (tag != "v") throw std::runtime_error("read_instance: expected vertex");
      for (double& c : vert) in >> c;
    }
    out.regions.emplace_back(out.num_users, std::move(verts));
  }
  in >> tag;
  if (tag != "end") throw std::runtime_error("read_instance: missing end marker");
  return out;
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  write_instance(instance, out);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  return read_instance(in);
}

}  // namespace dsched
