alpha24 = 'alpha-24'
beta24 = alpha24.upper()
gamma24 = [ch for ch in beta24 if ch.isalpha()]
print(''.join(gamma24))
