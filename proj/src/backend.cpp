#include <bzlib.h>
#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <string>
#include <vector>

#include "ncdm/compressor.hpp"
#include "ncdm/error.hpp"

extern char** environ;

namespace ncdm {
namespace {

std::size_t bzip2_size(std::string_view data, int block_size) {
  // Worst case expansion documented by bzip2: 1% + 600 bytes.
  std::vector<char> out(data.size() + data.size() / 100 + 601);
  auto out_len = static_cast<unsigned int>(out.size());
  int rc = BZ2_bzBuffToBuffCompress(
      out.data(), &out_len, const_cast<char*>(data.data()),
      static_cast<unsigned int>(data.size()), block_size, 0, 0);
  if (rc != BZ_OK) {
    throw BackendUnavailable("bzip2 compression failed with code " +
                             std::to_string(rc));
  }
  return out_len;
}

std::size_t deflate_size(std::string_view data, int level) {
  uLongf out_len = compressBound(static_cast<uLong>(data.size()));
  std::vector<Bytef> out(out_len);
  int rc = compress2(out.data(), &out_len,
                     reinterpret_cast<const Bytef*>(data.data()),
                     static_cast<uLong>(data.size()), level);
  if (rc != Z_OK) {
    throw BackendUnavailable("deflate compression failed with code " +
                             std::to_string(rc));
  }
  return out_len;
}

struct Fd {
  int fd = -1;
  explicit Fd(int f = -1) : fd(f) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

std::size_t external_size(std::string_view data, const std::string& command) {
  // stdin is a socket so writes can use MSG_NOSIGNAL when the child exits
  // before consuming all input.
  int in_pair[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0) {
    throw BackendUnavailable(std::string("socketpair: ") + std::strerror(errno));
  }
  Fd in_parent(in_pair[0]), in_child(in_pair[1]);
  int out_pipe[2];
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    throw BackendUnavailable(std::string("pipe: ") + std::strerror(errno));
  }
  Fd out_parent(out_pipe[0]), out_child(out_pipe[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_child.fd, STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_child.fd, STDOUT_FILENO);
  std::string sh = "/bin/sh";
  std::string dash_c = "-c";
  std::string cmd = command;
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
  pid_t pid = 0;
  int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw BackendUnavailable("cannot spawn '" + command + "': " +
                             std::strerror(rc));
  }
  in_child.reset();
  out_child.reset();

  std::size_t written = 0;
  std::size_t produced = 0;
  if (data.empty()) ::shutdown(in_parent.fd, SHUT_WR);
  char buf[1 << 16];
  bool input_open = !data.empty();
  while (true) {
    pollfd fds[2] = {{out_parent.fd, POLLIN, 0},
                     {input_open ? in_parent.fd : -1, POLLOUT, 0}};
    if (::poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (input_open && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = ::send(in_parent.fd, data.data() + written,
                         data.size() - written, MSG_NOSIGNAL | MSG_DONTWAIT);
      if (n > 0) written += static_cast<std::size_t>(n);
      if ((n < 0 && errno != EAGAIN && errno != EINTR) || written == data.size()) {
        ::shutdown(in_parent.fd, SHUT_WR);
        input_open = false;
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t n = ::read(out_parent.fd, buf, sizeof buf);
      if (n > 0) {
        produced += static_cast<std::size_t>(n);
      } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
        break;
      }
    }
  }
  in_parent.reset();

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code == 127) {
      throw BackendUnavailable("external compressor command not found: " + command);
    }
    throw BackendUnavailable("external compressor '" + command +
                             "' failed (exit status " + std::to_string(code) +
                             ")");
  }
  if (written != data.size()) {
    throw BackendUnavailable("external compressor '" + command +
                             "' did not consume its input");
  }
  return produced;
}

int parse_level(std::string_view text, std::string_view spec) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("bad level in backend spec '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

Backend Backend::bzip2(int block_size) {
  if (block_size < 1 || block_size > 9) {
    throw InvalidArgument("bzip2 block size must be in 1..9");
  }
  return Backend(BackendKind::kBwtBlock, block_size, {});
}

Backend Backend::deflate(int level) {
  if (level < -1 || level > 9) {
    throw InvalidArgument("deflate level must be in -1..9");
  }
  return Backend(BackendKind::kDeflate, level, {});
}

Backend Backend::external(std::string command) {
  if (command.empty()) throw InvalidArgument("external command is empty");
  return Backend(BackendKind::kExternal, 0, std::move(command));
}

Backend Backend::parse(std::string_view spec) {
  auto colon = spec.find(':');
  std::string_view head = spec.substr(0, colon);
  std::string_view tail =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  bool has_tail = colon != std::string_view::npos;
  if (head == "bzip2" || head == "bwt") {
    return bzip2(has_tail ? parse_level(tail, spec) : 9);
  }
  if (head == "deflate" || head == "zlib") {
    return deflate(has_tail ? parse_level(tail, spec) : -1);
  }
  if (head == "cmd" || head == "external") {
    return external(std::string(tail));
  }
  throw InvalidArgument("unknown backend '" + std::string(spec) + "'");
}

std::string Backend::name() const {
  switch (kind_) {
    case BackendKind::kBwtBlock:
      return "bzip2:" + std::to_string(level_);
    case BackendKind::kDeflate:
      return "deflate:" + std::to_string(level_);
    case BackendKind::kExternal:
      return "cmd:" + command_;
  }
  return {};
}

std::size_t Backend::compressed_size(std::string_view data) const {
  switch (kind_) {
    case BackendKind::kBwtBlock:
      return bzip2_size(data, level_);
    case BackendKind::kDeflate:
      return deflate_size(data, level_);
    case BackendKind::kExternal:
      return external_size(data, command_);
  }
  throw BackendUnavailable("unknown backend kind");
}

}  // namespace ncdm
