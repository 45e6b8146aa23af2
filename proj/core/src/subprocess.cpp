#include "wattline/subprocess.hpp"

#include <cerrno>
#include <chrono>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "wattline/errors.hpp"

namespace wattline {

namespace {

[[noreturn]] void exec_child(const std::vector<std::string>& argv, int err_fd) {
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) {
        args.push_back(const_cast<char*>(a.c_str()));
    }
    args.push_back(nullptr);
    execvp(args[0], args.data());
    // Only reached when exec fails: report errno through the CLOEXEC pipe.
    int e = errno;
    ssize_t ignored = write(err_fd, &e, sizeof(e));
    (void)ignored;
    _exit(127);
}

// Reads the errno a failed exec wrote into the status pipe; returns 0 if
// the exec succeeded (pipe closed empty via CLOEXEC).
int read_exec_errno(int fd) {
    int e = 0;
    ssize_t n;
    do {
        n = read(fd, &e, sizeof(e));
    } while (n < 0 && errno == EINTR);
    return n == static_cast<ssize_t>(sizeof(e)) ? e : 0;
}

void throw_spawn(const std::vector<std::string>& argv, int err) {
    throw SpawnError("cannot execute '" + (argv.empty() ? std::string() : argv[0]) +
                     "': " + std::strerror(err));
}

} // namespace

CaptureResult run_capture(const std::vector<std::string>& argv, int timeout_ms) {
    if (argv.empty()) {
        throw SpawnError("cannot execute: empty command line");
    }
    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0) {
        throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    }
    if (pipe2(err_pipe, O_CLOEXEC) != 0) {
        int e = errno;
        close(out_pipe[0]);
        close(out_pipe[1]);
        throw SpawnError(std::string("pipe: ") + std::strerror(e));
    }

    pid_t pid = fork();
    if (pid < 0) {
        int e = errno;
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        throw SpawnError(std::string("fork: ") + std::strerror(e));
    }
    if (pid == 0) {
        close(out_pipe[0]);
        close(err_pipe[0]);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(out_pipe[1]);
        exec_child(argv, err_pipe[1]);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    CaptureResult res;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    char buf[4096];
    bool open = true;
    while (open) {
        int wait_ms = -1;
        if (timeout_ms > 0) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - std::chrono::steady_clock::now())
                            .count();
            if (left <= 0) {
                res.timed_out = true;
                break;
            }
            wait_ms = static_cast<int>(left);
        }
        struct pollfd pfd {
            out_pipe[0], POLLIN, 0
        };
        int pr = poll(&pfd, 1, wait_ms);
        if (pr < 0) {
            if (errno == EINTR) {
                continue;
            }
            break;
        }
        if (pr == 0) {
            res.timed_out = true;
            break;
        }
        ssize_t n = read(out_pipe[0], buf, sizeof(buf));
        if (n > 0) {
            res.out.append(buf, static_cast<size_t>(n));
        } else if (n == 0 || (n < 0 && errno != EINTR)) {
            open = false;
        }
    }
    close(out_pipe[0]);

    if (res.timed_out) {
        kill(pid, SIGKILL);
    }
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }

    int exec_err = read_exec_errno(err_pipe[0]);
    close(err_pipe[0]);
    if (exec_err != 0) {
        throw_spawn(argv, exec_err);
    }

    if (WIFEXITED(status)) {
        res.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        res.term_signal = WTERMSIG(status);
    }
    return res;
}

RunStatus run_passthrough(const std::vector<std::string>& argv) {
    if (argv.empty()) {
        throw SpawnError("cannot execute: empty command line");
    }
    int err_pipe[2];
    if (pipe2(err_pipe, O_CLOEXEC) != 0) {
        throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    }
    pid_t pid = fork();
    if (pid < 0) {
        int e = errno;
        close(err_pipe[0]);
        close(err_pipe[1]);
        throw SpawnError(std::string("fork: ") + std::strerror(e));
    }
    if (pid == 0) {
        close(err_pipe[0]);
        exec_child(argv, err_pipe[1]);
    }
    close(err_pipe[1]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    int exec_err = read_exec_errno(err_pipe[0]);
    close(err_pipe[0]);
    if (exec_err != 0) {
        throw_spawn(argv, exec_err);
    }

    RunStatus rs;
    if (WIFEXITED(status)) {
        rs.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        rs.term_signal = WTERMSIG(status);
    }
    return rs;
}

} // namespace wattline
