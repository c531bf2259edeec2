#include "satd/process.hpp"

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace satd {

namespace {

[[noreturn]] void die_errno(const char* what) {
    throw std::runtime_error(std::string(what) + ": " + std::strerror(errno));
}

void set_cloexec(int fd) { fcntl(fd, F_SETFD, FD_CLOEXEC); }

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& opts) {
    if (argv.empty())
        throw std::runtime_error("run_process: empty argv");

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        die_errno("pipe");

    pid_t pid = fork();
    if (pid < 0)
        die_errno("fork");

    if (pid == 0) {
        // child
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
            close(fd);
        if (opts.cwd && chdir(opts.cwd->c_str()) != 0)
            _exit(127);
        for (const auto& [k, v] : opts.env)
            setenv(k.c_str(), v.c_str(), 1);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv)
            cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);
    set_cloexec(in_pipe[1]);
    set_cloexec(out_pipe[0]);
    set_cloexec(err_pipe[0]);

    // Ignore SIGPIPE while feeding stdin; a child that exits early is fine.
    signal(SIGPIPE, SIG_IGN);

    const std::string stdin_data = opts.stdin_data.value_or("");
    size_t written = 0;
    bool stdin_open = true;
    if (stdin_data.empty()) {
        close(in_pipe[1]);
        stdin_open = false;
    }

    ProcessResult result;
    bool out_open = true, err_open = true;
    char buf[65536];

    while (out_open || err_open || stdin_open) {
        struct pollfd fds[3];
        int n = 0;
        int out_idx = -1, err_idx = -1, in_idx = -1;
        if (out_open) { out_idx = n; fds[n++] = {out_pipe[0], POLLIN, 0}; }
        if (err_open) { err_idx = n; fds[n++] = {err_pipe[0], POLLIN, 0}; }
        if (stdin_open) { in_idx = n; fds[n++] = {in_pipe[1], POLLOUT, 0}; }
        if (poll(fds, n, -1) < 0) {
            if (errno == EINTR) continue;
            die_errno("poll");
        }
        if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
            ssize_t r = read(out_pipe[0], buf, sizeof buf);
            if (r > 0) result.out.append(buf, static_cast<size_t>(r));
            else { close(out_pipe[0]); out_open = false; }
        }
        if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) {
            ssize_t r = read(err_pipe[0], buf, sizeof buf);
            if (r > 0) result.err.append(buf, static_cast<size_t>(r));
            else { close(err_pipe[0]); err_open = false; }
        }
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
                close(in_pipe[1]);
                stdin_open = false;
            } else {
                ssize_t w = write(in_pipe[1], stdin_data.data() + written,
                                  stdin_data.size() - written);
                if (w > 0) written += static_cast<size_t>(w);
                if (w < 0 || written == stdin_data.size()) {
                    close(in_pipe[1]);
                    stdin_open = false;
                }
            }
        }
    }

    int status = 0;
    while (waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) die_errno("waitpid");
    }
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    return result;
}

ProcessResult run_shell(const std::string& command, const ProcessOptions& opts) {
    return run_process({"/bin/sh", "-c", command}, opts);
}

} // namespace satd
