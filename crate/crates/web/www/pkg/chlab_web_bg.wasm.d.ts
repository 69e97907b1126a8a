/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_lab_free: (a: number, b: number) => void;
export const lab_advance: (a: number, b: number) => [number, number];
export const lab_ball_scale: (a: number) => number;
export const lab_blocks_initial: (a: number) => [number, number];
export const lab_blocks_now: (a: number) => [number, number];
export const lab_energy: (a: number) => number;
export const lab_envelope: (a: number, b: number) => number;
export const lab_epsilon: (a: number) => number;
export const lab_first_block: (a: number) => number;
export const lab_highfreq: (a: number) => [number, number];
export const lab_history: (a: number) => [number, number];
export const lab_new: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const lab_set_forcing: (a: number, b: number) => [number, number];
export const lab_time: (a: number) => number;
export const lab_values: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
