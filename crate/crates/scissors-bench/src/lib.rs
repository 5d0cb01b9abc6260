// benchmarks live in benches/
