use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use toolreward_bench::mixed_corpus;
use toolreward_core::grpo::group_advantages;
use toolreward_core::reward::{compute_reward, match_calls, reward_batch, RewardWeights};
use toolreward_core::toolcall::{parse_completion, ToolCall};

fn parsing(c: &mut Criterion) {
    let corpus = mixed_corpus(256);
    c.bench_function("parse_completion/mixed_256", |b| {
        b.iter(|| {
            for r in &corpus.records {
                black_box(parse_completion(black_box(&r.completion)));
            }
        })
    });
}

fn matching(c: &mut Criterion) {
    let calls = |n: usize, shift: i64| -> Vec<ToolCall> {
        (0..n as i64)
            .map(|i| ToolCall::new("f").with_arg("a", i).with_arg("b", (i + shift) % 3))
            .collect()
    };
    for n in [2, 6, 12] {
        let (expected, predicted) = (calls(n, 0), calls(n, 1));
        c.bench_function(&format!("match_calls/same_name_{n}"), |b| {
            b.iter(|| match_calls(black_box(&expected), black_box(&predicted)))
        });
    }
}

fn rewards(c: &mut Criterion) {
    let corpus = mixed_corpus(256);
    let texts: Vec<&str> = corpus.records.iter().map(|r| r.completion.as_str()).collect();
    let expected: Vec<Vec<ToolCall>> = corpus.records.iter().map(|r| r.record.answers.clone()).collect();
    let w = RewardWeights::default();
    c.bench_function("compute_reward/single", |b| {
        b.iter(|| compute_reward(black_box(texts[3]), black_box(&expected[3]), &w))
    });
    c.bench_function("reward_batch/mixed_256", |b| b.iter(|| reward_batch(black_box(&texts), &expected, &w)));
}

fn advantages(c: &mut Criterion) {
    let rewards: Vec<f64> = (0..64).map(|i| (i * 37 % 64) as f64 / 64.0).collect();
    c.bench_function("group_advantages/64", |b| {
        b.iter_batched(|| rewards.clone(), |r| group_advantages(&r), BatchSize::SmallInput)
    });
}

criterion_group!(benches, parsing, matching, rewards, advantages);
criterion_main!(benches);
