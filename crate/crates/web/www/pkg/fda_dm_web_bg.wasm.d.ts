/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const ber_vs_angle: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
export const memory_ratio_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const secrecy_vs_snr: (a: number, b: number, c: number, d: bigint) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
