"""Command lines whose outputs are archived under tests/golden."""
GOLDEN = {
    "moore_f2sq_r3": ["moore", "build", "--group", "f2^2", "--r", "3"],
    "davis_interval": ["davis", "build", "--example", "interval"],
    "davis_disk": ["davis", "build", "--example", "disk"],
    "l2_noqsinger": ["l2", "derive", "--pipeline", "f2^4,davis:n=7,chambers=2^m", "--verdict"],
    "homalg_vanishing": ["homalg", "vanishing", "--d", "4"],
}
