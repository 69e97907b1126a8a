/* tslint:disable */
/* eslint-disable */

export class Lab {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Integrate for `duration` time units, recording `I` after each step.
     */
    advance(duration: number): void;
    /**
     * `C‖g‖²/ε²` scale for the absorbing ball, with `C = 1`.
     */
    ball_scale(): number;
    /**
     * `2^{2k}‖P_{2^k}u₀‖` by block.
     */
    blocks_initial(): Float64Array;
    /**
     * `2^{2k}‖P_{2^k}u(t)‖` by block.
     */
    blocks_now(): Float64Array;
    energy(): number;
    /**
     * `I(0)e^{-εt/2}` at time `t`.
     */
    envelope(t: number): number;
    epsilon(): number;
    /**
     * First dyadic index of the block tables.
     */
    first_block(): number;
    /**
     * `I_{>k}(t)^{1/2}` for `k = 0, 1, …` while `2^k < N/3`.
     */
    highfreq(): Float64Array;
    /**
     * Interleaved `(t, I)` pairs since the start.
     */
    history(): Float64Array;
    /**
     * A rough random datum with `I(u₀) = radius²` under forcing of size
     * `amplitude`, with `a ≡ 1` and `ε = 0.5`.
     */
    constructor(resolution: number, amplitude: number, radius: number, seed: bigint);
    /**
     * Replace the forcing amplitude, keeping the current state.
     */
    set_forcing(amplitude: number): void;
    time(): number;
    /**
     * Grid values of `u(t)`.
     */
    values(): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_lab_free: (a: number, b: number) => void;
    readonly lab_advance: (a: number, b: number) => [number, number];
    readonly lab_ball_scale: (a: number) => number;
    readonly lab_blocks_initial: (a: number) => [number, number];
    readonly lab_blocks_now: (a: number) => [number, number];
    readonly lab_energy: (a: number) => number;
    readonly lab_envelope: (a: number, b: number) => number;
    readonly lab_epsilon: (a: number) => number;
    readonly lab_first_block: (a: number) => number;
    readonly lab_highfreq: (a: number) => [number, number];
    readonly lab_history: (a: number) => [number, number];
    readonly lab_new: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly lab_set_forcing: (a: number, b: number) => [number, number];
    readonly lab_time: (a: number) => number;
    readonly lab_values: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
