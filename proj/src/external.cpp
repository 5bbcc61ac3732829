#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "galaxy/errors.hpp"
#include "galaxy/verifiers.hpp"

namespace galaxy {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct SubprocessResult {
    bool timed_out = false;
    bool signaled = false;
    int exit_code = 0;
    int term_signal = 0;
    std::string out;
    std::string err;
};

void read_available(int fd, std::string& sink, bool& eof) {
    char buf[4096];
    for (;;) {
        ssize_t n = ::read(fd, buf, sizeof(buf));
        if (n > 0) {
            sink.append(buf, static_cast<std::size_t>(n));
        } else if (n == 0) {
            eof = true;
            return;
        } else {
            if (errno == EAGAIN || errno == EWOULDBLOCK) return;
            eof = true;
            return;
        }
    }
}

/// Runs argv with `input` on stdin, enforcing the deadline with SIGKILL.
/// The child is always reaped before returning.
SubprocessResult run_subprocess(const std::vector<std::string>& argv, const std::string& input,
                                std::int64_t timeout_ms) {
    ::signal(SIGPIPE, SIG_IGN);
    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (::pipe(in_pipe) || ::pipe(out_pipe) || ::pipe(err_pipe))
        throw IoError("pipe() failed");

    pid_t pid = ::fork();
    if (pid < 0) throw IoError("fork() failed");
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
            ::close(fd);
        std::vector<char*> cargv;
        for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        ::execv(cargv[0], cargv.data());
        ::_exit(127);
    }

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    ::fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    // Request fits comfortably inside the pipe buffer at this scale; a full
    // pipe just surfaces as a short write and a crash verdict downstream.
    ssize_t ignored = ::write(in_pipe[1], input.data(), input.size());
    (void)ignored;
    ::close(in_pipe[1]);

    SubprocessResult res;
    auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    bool out_eof = false, err_eof = false;
    while (!(out_eof && err_eof)) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (remaining.count() <= 0) {
            res.timed_out = true;
            break;
        }
        struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
        int nfds = ::poll(fds, 2, static_cast<int>(std::min<std::int64_t>(remaining.count(), 100)));
        if (nfds < 0 && errno != EINTR) break;
        if (fds[0].revents) read_available(out_pipe[0], res.out, out_eof);
        if (fds[1].revents) read_available(err_pipe[0], res.err, err_eof);
        if ((fds[0].revents & POLLHUP) && !(fds[0].revents & POLLIN)) out_eof = true;
        if ((fds[1].revents & POLLHUP) && !(fds[1].revents & POLLIN)) err_eof = true;
    }
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);

    int status = 0;
    if (res.timed_out) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        return res;
    }
    // Streams closed; wait out the exit with the remaining budget.
    for (;;) {
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (Clock::now() > deadline) {
            res.timed_out = true;
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            return res;
        }
        ::usleep(1000);
    }
    if (WIFSIGNALED(status)) {
        res.signaled = true;
        res.term_signal = WTERMSIG(status);
    } else {
        res.exit_code = WEXITSTATUS(status);
    }
    return res;
}

std::string first_line(const std::string& s) {
    auto nl = s.find('\n');
    return nl == std::string::npos ? s : s.substr(0, nl);
}

std::string truncated(const std::string& s, std::size_t n = 512) {
    return s.size() <= n ? s : s.substr(0, n) + "...";
}

}  // namespace

ExternalVerifier::ExternalVerifier(std::string name, ExternalConfig cfg)
    : Verifier(std::move(name)), cfg_(std::move(cfg)) {
    if (cfg_.command.empty() || ::access(cfg_.command[0].c_str(), X_OK) != 0)
        throw AdapterNotFound("adapter not found or not executable: " +
                              (cfg_.command.empty() ? "<empty>" : cfg_.command[0]));
}

Verdict ExternalVerifier::verify(const TestCase& tc) {
    json request;
    request["model"] = json::parse(network_to_json(tc.network));
    request["spec"] = json::parse(spec_to_json(tc.spec));
    request["timeout_ms"] = cfg_.timeout_ms;
    std::string input = request.dump() + "\n";

    SubprocessResult res = run_subprocess(cfg_.command, input, cfg_.timeout_ms);
    if (res.timed_out) return Verdict::timeout();
    if (res.signaled)
        return Verdict::crash("adapter killed by signal " + std::to_string(res.term_signal) +
                              "; stderr: " + truncated(res.err));
    if (res.exit_code != 0)
        return Verdict::crash("adapter exit code " + std::to_string(res.exit_code) +
                              "; stdout: " + truncated(res.out) + "; stderr: " + truncated(res.err));

    json reply = json::parse(first_line(res.out), nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("verdict"))
        return Verdict::crash("malformed adapter output: " + truncated(res.out));
    std::string verdict = reply["verdict"].is_string() ? reply["verdict"].get<std::string>() : "";
    if (verdict == "holds") return Verdict::holds();
    if (verdict == "unknown") return Verdict::unknown("reported by adapter");
    if (verdict == "timeout") return Verdict::timeout();
    if (verdict == "violated") {
        if (!reply.contains("cex") || !reply["cex"].is_array())
            return Verdict::crash("violated verdict without cex array: " + truncated(res.out));
        std::vector<double> cex;
        for (const json& v : reply["cex"]) {
            if (!v.is_number())
                return Verdict::crash("non-numeric cex entry: " + truncated(res.out));
            cex.push_back(v.get<double>());
        }
        return Verdict::violated(std::move(cex));
    }
    return Verdict::crash("unknown verdict string: " + truncated(res.out));
}

}  // namespace galaxy
