#include "osintphish/probe.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "osintphish/error.hpp"

extern char** environ;

namespace osintphish {
namespace {

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

std::string errno_text() { return std::strerror(errno); }

}  // namespace

std::vector<std::string> nmap_command(const ToolPaths& tools, const std::string& domain) {
  return {tools.nmap, "-Pn", "-T4", "--max-retries", "3", domain};
}

std::vector<std::string> harvester_command(const ToolPaths& tools, const std::string& domain) {
  std::vector<std::string> argv;
  if (!tools.harvester_interpreter.empty()) argv.push_back(tools.harvester_interpreter);
  argv.insert(argv.end(), {tools.harvester, "-d", domain, "-l", "500", "-b", "all"});
  return argv;
}

ProcessResult run_process(const std::vector<std::string>& argv, double timeout_s) {
  if (argv.empty()) throw ProbeError("empty command line");
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw ProbeError("pipe: " + errno_text());
  Fd read_end(fds[0]);
  Fd write_end(fds[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, write_end.get(), STDOUT_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, &attr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) throw ProbeError("cannot start '" + argv[0] + "': " + std::strerror(rc));
  write_end.reset();

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(timeout_s));
  char buffer[4096];
  while (true) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{read_end.get(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1000)));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    const ssize_t n = ::read(read_end.get(), buffer, sizeof buffer);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;  // EOF: every writer closed
    result.output.append(buffer, static_cast<std::size_t>(n));
  }
  if (result.timed_out) ::kill(-pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

PortScanReport LiveBackend::scan(const std::string& domain, double timeout_s) {
  if (!is_hostname(domain)) throw ProbeError("not a hostname: '" + domain + "'");
  const ProcessResult run = run_process(nmap_command(tools_, domain), timeout_s);
  if (run.timed_out) {
    PortScanReport report = failed_scan(domain);
    report.timed_out = true;
    return report;
  }
  // A nonzero exit is tolerated as long as the output parses.
  PortScanReport report = parse_nmap_output(run.output);
  report.domain = domain;
  return report;
}

HarvestReport LiveBackend::harvest(const std::string& domain, double timeout_s) {
  if (!is_hostname(domain)) throw ProbeError("not a hostname: '" + domain + "'");
  const ProcessResult run = run_process(harvester_command(tools_, domain), timeout_s);
  if (run.timed_out) {
    HarvestReport report = failed_harvest(domain);
    report.timed_out = true;
    return report;
  }
  if (run.exit_code != 0 && run.output.find("[*]") == std::string::npos) {
    throw ParseError("theHarvester exited with status " + std::to_string(run.exit_code) +
                         " and produced no recognizable output",
                     run.output);
  }
  HarvestReport report = parse_harvester_output(run.output);
  report.domain = domain;
  return report;
}

void to_json(nlohmann::json& j, const Fixture& f) {
  j = {{"domain", f.domain},
       {"nmap_raw", f.nmap_raw},
       {"harvester_raw", f.harvester_raw},
       {"recorded_at", f.recorded_at}};
  if (f.nmap) j["nmap"] = *f.nmap;
  if (f.harvester) j["harvester"] = *f.harvester;
}

void from_json(const nlohmann::json& j, Fixture& f) {
  f.domain = j.at("domain").get<std::string>();
  f.nmap_raw = j.at("nmap_raw").get<std::string>();
  f.harvester_raw = j.at("harvester_raw").get<std::string>();
  f.recorded_at = j.value("recorded_at", "");
  f.nmap = j.contains("nmap") ? std::optional(j["nmap"].get<PortScanReport>()) : std::nullopt;
  f.harvester = j.contains("harvester") ? std::optional(j["harvester"].get<HarvestReport>()) : std::nullopt;
}

Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProbeError("cannot open fixture '" + path + "'");
  try {
    return nlohmann::json::parse(in).get<Fixture>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed fixture '" + path + "': " + e.what());
  }
}

void save_fixture(const std::string& path, const Fixture& fixture) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << nlohmann::json(fixture).dump(2) << "\n";
}

Fixture FixtureBackend::fixture_for(const std::string& domain) const {
  if (directory_.empty()) {
    const auto it = fixtures_.find(domain);
    if (it == fixtures_.end()) throw MissingFixtureError(domain);
    return it->second;
  }
  const std::filesystem::path path = std::filesystem::path(directory_) / (domain + ".json");
  if (!is_hostname(domain) || !std::filesystem::exists(path)) throw MissingFixtureError(domain);
  return load_fixture(path.string());
}

PortScanReport FixtureBackend::scan(const std::string& domain, double) {
  PortScanReport report = parse_nmap_output(fixture_for(domain).nmap_raw);
  report.domain = domain;
  return report;
}

HarvestReport FixtureBackend::harvest(const std::string& domain, double) {
  HarvestReport report = parse_harvester_output(fixture_for(domain).harvester_raw);
  report.domain = domain;
  return report;
}

std::map<std::string, Fixture> FixtureBackend::all() const {
  if (directory_.empty()) return fixtures_;
  std::map<std::string, Fixture> out;
  for (const auto& entry : std::filesystem::directory_iterator(directory_)) {
    if (entry.path().extension() != ".json") continue;
    Fixture f = load_fixture(entry.path().string());
    out.emplace(f.domain, std::move(f));
  }
  return out;
}

}  // namespace osintphish
